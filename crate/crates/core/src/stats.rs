//! Small descriptive statistics used by the sweep and network reports.

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("statistic of an empty sample")]
pub struct EmptySample;

/// Middle of the sorted sample, or the mean of the two middle values.
pub fn median(values: &[f64]) -> Result<f64, EmptySample> {
    if values.is_empty() {
        return Err(EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Ok(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

pub fn mean(values: &[f64]) -> Result<f64, EmptySample> {
    if values.is_empty() {
        return Err(EmptySample);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Adjusted Fisher-Pearson sample skewness `G1`. Zero for fewer than three
/// values or zero variance.
pub fn skewness(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 3 {
        return 0.0;
    }
    let nf = n as f64;
    let mu = values.iter().sum::<f64>() / nf;
    let (m2, m3) = values.iter().fold((0.0, 0.0), |(m2, m3), &x| {
        let d = x - mu;
        (m2 + d * d, m3 + d * d * d)
    });
    let (m2, m3) = (m2 / nf, m3 / nf);
    // Spread at rounding level counts as all-equal.
    if m2.sqrt() <= 1e-12 * mu.abs() || m2 == 0.0 {
        return 0.0;
    }
    let g1 = m3 / m2.powf(1.5);
    g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
}

/// Weighted least-squares non-increasing fit (pool adjacent violators).
///
/// Panics if the slices differ in length.
pub fn isotonic_non_increasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // Blocks of (weighted mean, total weight, length).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let w = w1 + w2;
            let m = if w > 0.0 {
                (m1 * w1 + m2 * w2) / w
            } else {
                (m1 + m2) / 2.0
            };
            blocks.push((m, w, l1 + l2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, len)| std::iter::repeat_n(m, len))
        .collect()
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// `None` when either sample has no rank variance.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Ok(2.0));
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]), Ok(2.5));
        assert_eq!(median(&[5.0]), Ok(5.0));
        assert_eq!(median(&[]), Err(EmptySample));
    }

    #[test]
    fn skewness_values() {
        assert_eq!(skewness(&[2.0; 10]), 0.0);
        assert_eq!(skewness(&[1.0, 2.0]), 0.0);
        assert!(skewness(&[1.0, 2.0, 3.0]).abs() < 1e-12);
        // scipy.stats.skew([1, 2, 3, 10], bias=False)
        assert!((skewness(&[1.0, 2.0, 3.0, 10.0]) - 1.763_632_614_803_888).abs() < 1e-12);
        assert!(skewness(&[0.0, 0.0, 0.0, 0.0, 5.0]) > 0.0);
    }

    #[test]
    fn isotonic_fit() {
        let w = [1.0; 5];
        assert_eq!(
            isotonic_non_increasing(&[100.0, 90.0, 95.0, 40.0, 45.0], &w),
            vec![100.0, 92.5, 92.5, 42.5, 42.5]
        );
        assert_eq!(
            isotonic_non_increasing(&[3.0, 2.0, 1.0], &[1.0; 3]),
            vec![3.0, 2.0, 1.0]
        );
        assert_eq!(
            isotonic_non_increasing(&[1.0, 2.0, 3.0], &[1.0; 3]),
            vec![2.0; 3]
        );
        assert_eq!(
            isotonic_non_increasing(&[1.0, 4.0], &[3.0, 1.0]),
            vec![1.75, 1.75]
        );
        assert!(isotonic_non_increasing(&[], &[]).is_empty());
    }

    #[test]
    fn spearman_values() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(spearman(&x, &[2.0, 4.0, 8.0, 16.0, 32.0]), Some(1.0));
        assert_eq!(spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&x, &[1.0; 5]), None);
        // scipy.stats.spearmanr([1,2,3,4,5], [1,3,2,2,5]).statistic
        let r = spearman(&x, &[1.0, 3.0, 2.0, 2.0, 5.0]).unwrap();
        assert!((r - 0.666_885_928_855_350_1).abs() < 1e-12, "{r}");
    }
}
