//! Constrainedness sweeps: generate an ensemble at each γ point, solve every
//! sample, and aggregate one row per point.
//!
//! Sample `(i, j)` is generated from `derive_seed(master, i, j)` and results
//! are reduced in index order, so the rows do not depend on how many workers
//! ran or in which order samples finished.

use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use thiserror::Error;

use crate::gen::{Gamma, GenError, GeneratorSpec};
use crate::net::{self, ClausalGraph};
use crate::solver::{solve, SolverLimits, Status};
use crate::stats;

pub use crate::rng::{derive_seed, Seed};
pub use crate::stats::median;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("gamma_step must be positive")]
    ZeroStep,
    #[error("gamma_start {start} exceeds gamma_stop {stop}")]
    EmptyRange { start: Gamma, stop: Gamma },
    #[error("samples_per_point must be at least 1")]
    NoSamples,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("satisfiable percentage never crosses 50% in the sweep range")]
pub struct NoCrossing;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("missing or unexpected header `{0}`")]
    Header(String),
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

/// Whether solve times are measured. Wall-clock times differ between runs,
/// so byte-reproducible output needs [`Timing::Off`], which records zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Timing {
    #[default]
    Wall,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Distribution template; its own γ is replaced at every point.
    pub generator: GeneratorSpec,
    pub gamma_start: Gamma,
    pub gamma_stop: Gamma,
    pub gamma_step: Gamma,
    pub samples_per_point: u32,
    pub limits: SolverLimits,
    pub master_seed: Seed,
    pub compute_metrics: bool,
    pub timing: Timing,
    /// `None` uses rayon's global pool.
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if *self.gamma_step.ratio().numer() == 0 {
            return Err(SweepError::ZeroStep);
        }
        if self.gamma_start > self.gamma_stop {
            return Err(SweepError::EmptyRange {
                start: self.gamma_start,
                stop: self.gamma_stop,
            });
        }
        if self.samples_per_point == 0 {
            return Err(SweepError::NoSamples);
        }
        if self.workers == Some(0) {
            return Err(SweepError::NoWorkers);
        }
        self.generator.validate()?;
        Ok(())
    }

    /// `gamma_start + i * gamma_step` for every point not beyond `gamma_stop`.
    pub fn gamma_points(&self) -> Vec<Gamma> {
        if *self.gamma_step.ratio().numer() == 0 || self.gamma_start > self.gamma_stop {
            return Vec::new();
        }
        let span = self.gamma_stop.ratio() - self.gamma_start.ratio();
        let count = (span / self.gamma_step.ratio()).to_integer() + 1;
        (0..count)
            .map(|i| self.gamma_start + self.gamma_step * i)
            .collect()
    }
}

/// Network means for one γ point; `NaN` where no sample had the value defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub mean_clustering: f64,
    pub mean_path_length: f64,
    pub mean_proximity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: Gamma,
    pub n_samples: u32,
    /// Share of all samples that were SAT, in percent.
    pub pct_sat: f64,
    /// Over non-timeout samples; `NaN` if every sample timed out.
    pub median_backtracks: f64,
    pub median_elapsed_ms: f64,
    pub n_timeouts: u32,
    pub metrics: Option<PointMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub status: Status,
    pub backtracks: u64,
    pub decisions: u64,
    pub elapsed_ms: f64,
    /// `(C, L, mu)` when metrics are requested.
    pub network: Option<(f64, Option<f64>, Option<f64>)>,
}

fn run_sample(
    spec: &SweepSpec,
    point: usize,
    gamma: Gamma,
    sample: u32,
) -> Result<SampleOutcome, GenError> {
    let seed = derive_seed(spec.master_seed, point as u64, sample as u64);
    let formula = spec.generator.with_gamma(gamma).generate(seed)?;
    let result = solve(&formula, spec.limits);
    let network = spec.compute_metrics.then(|| {
        let g = ClausalGraph::from_formula(&formula);
        let c = net::avg_clustering(&g);
        let l = net::avg_path_length(&g).ok();
        let mu =
            l.and_then(|l| net::proximity_ratio_from(c, l, g.node_count(), g.mean_degree()).ok());
        (c, l, mu)
    });
    Ok(SampleOutcome {
        status: result.status,
        backtracks: result.backtracks,
        decisions: result.decisions,
        elapsed_ms: match spec.timing {
            Timing::Wall => result.elapsed.as_secs_f64() * 1e3,
            Timing::Off => 0.0,
        },
        network,
    })
}

/// Runs every sample and returns the outcomes grouped by γ point, in index order.
pub fn run_samples(spec: &SweepSpec) -> Result<Vec<(Gamma, Vec<SampleOutcome>)>, SweepError> {
    spec.validate()?;
    let points = spec.gamma_points();
    let per_point = spec.samples_per_point as usize;
    let total = points.len() * per_point;
    let work = || {
        (0..total)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / per_point, idx % per_point);
                run_sample(spec, i, points[i], j as u32)
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let flat = match spec.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(work),
        None => work(),
    }?;
    let mut flat = flat.into_iter();
    Ok(points
        .into_iter()
        .map(|g| (g, flat.by_ref().take(per_point).collect()))
        .collect())
}

fn mean_or_nan(values: &[f64]) -> f64 {
    stats::mean(values).unwrap_or(f64::NAN)
}

pub fn aggregate(gamma: Gamma, samples: &[SampleOutcome]) -> SweepRow {
    let n = samples.len();
    let sat = samples.iter().filter(|s| s.status == Status::Sat).count();
    let finished: Vec<&SampleOutcome> = samples
        .iter()
        .filter(|s| s.status != Status::Timeout)
        .collect();
    let backtracks: Vec<f64> = finished.iter().map(|s| s.backtracks as f64).collect();
    let elapsed: Vec<f64> = finished.iter().map(|s| s.elapsed_ms).collect();
    let metrics = if samples.iter().all(|s| s.network.is_some()) && n > 0 {
        let nets: Vec<_> = samples.iter().filter_map(|s| s.network).collect();
        let c: Vec<f64> = nets.iter().map(|m| m.0).collect();
        let l: Vec<f64> = nets.iter().filter_map(|m| m.1).collect();
        let mu: Vec<f64> = nets.iter().filter_map(|m| m.2).collect();
        Some(PointMetrics {
            mean_clustering: mean_or_nan(&c),
            mean_path_length: mean_or_nan(&l),
            mean_proximity: mean_or_nan(&mu),
        })
    } else {
        None
    };
    SweepRow {
        gamma,
        n_samples: n as u32,
        pct_sat: if n == 0 {
            0.0
        } else {
            100.0 * sat as f64 / n as f64
        },
        median_backtracks: median(&backtracks).unwrap_or(f64::NAN),
        median_elapsed_ms: median(&elapsed).unwrap_or(f64::NAN),
        n_timeouts: (n - finished.len()) as u32,
        metrics,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    Ok(run_samples(spec)?
        .iter()
        .map(|(g, samples)| aggregate(*g, samples))
        .collect())
}

/// γ where the isotonically smoothed satisfiable percentage falls through 50%,
/// interpolated linearly between the two straddling points.
pub fn crossover_estimate(rows: &[SweepRow]) -> Result<f64, NoCrossing> {
    let pct: Vec<f64> = rows.iter().map(|r| r.pct_sat).collect();
    let weights: Vec<f64> = rows.iter().map(|r| r.n_samples.max(1) as f64).collect();
    let smooth = stats::isotonic_non_increasing(&pct, &weights);
    for i in 0..rows.len().saturating_sub(1) {
        let (hi, lo) = (smooth[i], smooth[i + 1]);
        if hi >= 50.0 && lo < 50.0 {
            let (g0, g1) = (rows[i].gamma.to_f64(), rows[i + 1].gamma.to_f64());
            return Ok(g0 + (hi - 50.0) / (hi - lo) * (g1 - g0));
        }
    }
    Err(NoCrossing)
}

const BASE_HEADER: &str = "gamma,n_samples,pct_sat,median_backtracks,median_elapsed_ms,n_timeouts";
const METRIC_HEADER: &str = ",mean_C,mean_L,mean_mu";

fn fmt6(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.6}")
    }
}

/// CSV text: metric columns appear when any row carries metrics.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let with_metrics = rows.iter().any(|r| r.metrics.is_some());
    let mut out = String::from(BASE_HEADER);
    if with_metrics {
        out.push_str(METRIC_HEADER);
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            fmt6(r.gamma.to_f64()),
            r.n_samples,
            fmt6(r.pct_sat),
            fmt6(r.median_backtracks),
            fmt6(r.median_elapsed_ms),
            r.n_timeouts
        );
        if with_metrics {
            let m = r.metrics.unwrap_or(PointMetrics {
                mean_clustering: f64::NAN,
                mean_path_length: f64::NAN,
                mean_proximity: f64::NAN,
            });
            let _ = write!(
                out,
                ",{},{},{}",
                fmt6(m.mean_clustering),
                fmt6(m.mean_path_length),
                fmt6(m.mean_proximity)
            );
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[SweepRow], mut dest: impl io::Write) -> io::Result<()> {
    dest.write_all(to_csv(rows).as_bytes())?;
    dest.flush()
}

pub fn read_csv(text: &str) -> Result<Vec<SweepRow>, CsvError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let with_metrics = if header == BASE_HEADER {
        false
    } else if header == format!("{BASE_HEADER}{METRIC_HEADER}") {
        true
    } else {
        return Err(CsvError::Header(header.to_string()));
    };
    let width = if with_metrics { 9 } else { 6 };
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let bad = |reason: &str| CsvError::Row {
            line: line_no,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(bad("wrong number of fields"));
        }
        let float = |i: usize| -> Result<f64, CsvError> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| bad(&format!("field {}", i + 1)))
        };
        let int = |i: usize| -> Result<u32, CsvError> {
            fields[i]
                .parse::<u32>()
                .map_err(|_| bad(&format!("field {}", i + 1)))
        };
        rows.push(SweepRow {
            gamma: fields[0].parse().map_err(|_| bad("gamma"))?,
            n_samples: int(1)?,
            pct_sat: float(2)?,
            median_backtracks: float(3)?,
            median_elapsed_ms: float(4)?,
            n_timeouts: int(5)?,
            metrics: if with_metrics {
                Some(PointMetrics {
                    mean_clustering: float(6)?,
                    mean_path_length: float(7)?,
                    mean_proximity: float(8)?,
                })
            } else {
                None
            },
        });
    }
    Ok(rows)
}
