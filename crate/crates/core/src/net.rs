//! Variable co-occurrence ("clausal") graphs and their small-world metrics.
//!
//! Nodes are variables; two variables are linked when they appear together in
//! at least one clause, whatever their polarities. Node `i` of the graph is
//! variable `i + 1`.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::stats;

pub const DEFAULT_CENTRALITY_TOL: f64 = 1e-10;
pub const DEFAULT_CENTRALITY_MAX_ITER: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("graph has no edges")]
    Edgeless,
    #[error("graph has no connected pair of distinct nodes")]
    NoConnectedPairs,
    #[error("mean degree {0} is not above 1, the random-graph path length is undefined")]
    SparseDegree(f64),
    #[error("histogram needs at least one bin and one value")]
    EmptyHistogram,
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClausalGraph {
    adj: Vec<Vec<u32>>,
    edges: usize,
}

impl ClausalGraph {
    /// Builds a graph from an edge list, dropping self-loops and repeats.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let edges = adj.iter().map(Vec::len).sum::<usize>() / 2;
        ClausalGraph { adj, edges }
    }

    pub fn from_formula(formula: &CnfFormula) -> Self {
        let pairs = formula.clauses().iter().flat_map(|clause| {
            let vars: Vec<u32> = clause.vars().map(|v| v - 1).collect();
            let mut out = Vec::with_capacity(vars.len() * vars.len().saturating_sub(1) / 2);
            for (i, &a) in vars.iter().enumerate() {
                for &b in &vars[i + 1..] {
                    out.push((a, b));
                }
            }
            out
        });
        Self::from_edges(formula.num_vars() as usize, pairs)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    /// Average degree `2E / n`.
    pub fn mean_degree(&self) -> f64 {
        if self.adj.is_empty() {
            0.0
        } else {
            2.0 * self.edges as f64 / self.adj.len() as f64
        }
    }
}

pub fn build_graph(formula: &CnfFormula) -> ClausalGraph {
    ClausalGraph::from_formula(formula)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    /// Unit Euclidean norm, non-negative.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Eigenvector centrality by power iteration.
///
/// Iterates `x <- (A + I) x / |(A + I) x|` from the uniform vector. The shift
/// keeps the eigenvectors of the adjacency matrix but makes the dominant
/// eigenvalue strictly largest in magnitude, so bipartite graphs converge
/// instead of oscillating. Stops once successive iterates differ by less than
/// `tol` in max-norm; if `max_iter` runs out first the last iterate is
/// returned with `converged == false`.
pub fn eigenvector_centrality(
    g: &ClausalGraph,
    tol: f64,
    max_iter: usize,
) -> Result<Centrality, NetError> {
    if g.edge_count() == 0 {
        return Err(NetError::Edgeless);
    }
    let n = g.node_count();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for iter in 1..=max_iter {
        for (i, out) in next.iter_mut().enumerate() {
            *out = x[i] + g.adj[i].iter().map(|&j| x[j as usize]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        let delta = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if delta < tol {
            return Ok(Centrality {
                values: x,
                iterations: iter,
                converged: true,
            });
        }
    }
    Ok(Centrality {
        values: x,
        iterations: max_iter,
        converged: false,
    })
}

/// Local clustering of one node; zero below degree two.
pub fn local_clustering(g: &ClausalGraph, node: usize) -> f64 {
    let nbrs = g.neighbors(node);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        links += count_common(g.neighbors(a as usize), &nbrs[i + 1..]);
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}

/// Size of the intersection of two sorted lists.
fn count_common(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Mean local clustering over all nodes (zero for an empty graph).
pub fn avg_clustering(g: &ClausalGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).map(|i| local_clustering(g, i)).sum::<f64>() / n as f64
}

/// Sum of BFS distances from `source` and the number of nodes reached (excluding itself).
fn bfs_totals(g: &ClausalGraph, source: usize) -> (u64, u64) {
    let mut dist = vec![u32::MAX; g.node_count()];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    let (mut sum, mut reached) = (0u64, 0u64);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for &w in g.neighbors(u) {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = du + 1;
                sum += (du + 1) as u64;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    (sum, reached)
}

/// Mean shortest-path length over ordered pairs of distinct connected nodes.
///
/// Sources run in parallel; totals are integers, so the result does not
/// depend on scheduling.
pub fn avg_path_length(g: &ClausalGraph) -> Result<f64, NetError> {
    let (sum, pairs) = (0..g.node_count())
        .into_par_iter()
        .map(|s| bfs_totals(g, s))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if pairs == 0 {
        return Err(NetError::NoConnectedPairs);
    }
    Ok(sum as f64 / pairs as f64)
}

/// `(C / L) / (C_rand / L_rand)` with the random-graph expectations
/// `C_rand = z / n` and `L_rand = ln n / ln z`.
pub fn proximity_ratio_from(
    clustering: f64,
    path_length: f64,
    n: usize,
    mean_degree: f64,
) -> Result<f64, NetError> {
    if mean_degree <= 1.0 {
        return Err(NetError::SparseDegree(mean_degree));
    }
    let n = n as f64;
    let c_rand = mean_degree / n;
    let l_rand = n.ln() / mean_degree.ln();
    Ok((clustering / path_length) / (c_rand / l_rand))
}

pub fn proximity_ratio(g: &ClausalGraph) -> Result<f64, NetError> {
    let z = g.mean_degree();
    if z <= 1.0 {
        return Err(NetError::SparseDegree(z));
    }
    let l = avg_path_length(g)?;
    proximity_ratio_from(avg_clustering(g), l, g.node_count(), z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges from the minimum to the maximum value.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub skewness: f64,
}

impl Histogram {
    /// `bin_lo,bin_hi,count` rows with six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (i, count) in self.counts.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:.6},{:.6},{}",
                self.edges[i],
                self.edges[i + 1],
                count
            );
        }
        out
    }
}

/// Equal-width histogram over `[min, max]`; the maximum falls in the last bin
/// and a constant sample puts everything in the first.
pub fn centrality_histogram(values: &[f64], bins: usize) -> Result<Histogram, NetError> {
    if bins == 0 || values.is_empty() {
        return Err(NetError::EmptyHistogram);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0; bins];
    for &v in values {
        let idx = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        skewness: stats::skewness(values),
    })
}

/// Flat metrics record for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMetrics {
    pub n: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub clustering: f64,
    /// `None` when no pair of nodes is connected.
    pub path_length: Option<f64>,
    /// `None` when the mean degree is at most 1 or there is no path length.
    pub proximity: Option<f64>,
    /// `None` for edgeless graphs.
    pub centrality: Option<Centrality>,
    /// Skewness of the centrality values (`None` with no centrality).
    pub skewness: Option<f64>,
}

impl NetworkMetrics {
    pub fn compute(g: &ClausalGraph) -> Self {
        let clustering = avg_clustering(g);
        let path_length = avg_path_length(g).ok();
        let mean_degree = g.mean_degree();
        let proximity = path_length
            .and_then(|l| proximity_ratio_from(clustering, l, g.node_count(), mean_degree).ok());
        let centrality =
            eigenvector_centrality(g, DEFAULT_CENTRALITY_TOL, DEFAULT_CENTRALITY_MAX_ITER).ok();
        let skewness = centrality.as_ref().map(|c| stats::skewness(&c.values));
        NetworkMetrics {
            n: g.node_count(),
            edges: g.edge_count(),
            mean_degree,
            clustering,
            path_length,
            proximity,
            centrality,
            skewness,
        }
    }

    pub fn converged(&self) -> bool {
        self.centrality.as_ref().is_some_and(|c| c.converged)
    }

    /// `n=.. edges=.. z=.. C=.. L=.. mu=.. skew=..`; undefined values print as `nan`.
    pub fn summary_line(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.6}"));
        format!(
            "n={} edges={} z={:.6} C={:.6} L={} mu={} skew={}",
            self.n,
            self.edges,
            self.mean_degree,
            self.clustering,
            opt(self.path_length),
            opt(self.proximity),
            opt(self.skewness),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;

    fn triangle() -> ClausalGraph {
        ClausalGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)])
    }

    fn star4() -> ClausalGraph {
        ClausalGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)])
    }

    fn formula(num_vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c).unwrap())
            .collect();
        CnfFormula::new(num_vars, clauses).unwrap()
    }

    #[test]
    fn single_clause_is_a_triangle() {
        let g = build_graph(&formula(3, &[&[1, -2, 3]]));
        assert_eq!(g, triangle());
    }

    #[test]
    fn polarity_and_repeats_collapse() {
        let g = build_graph(&formula(2, &[&[1, 2], &[-1, -2]]));
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn isolated_variables_are_nodes() {
        let g = build_graph(&formula(5, &[&[1, 2]]));
        assert_eq!((g.node_count(), g.edge_count()), (5, 1));
        assert_eq!(g.degree(4), 0);
    }

    #[test]
    fn three_clause_triangle() {
        // Three variables, three clauses: a three-node network.
        let f = formula(3, &[&[1, 2], &[-2, 3], &[-1, -3]]);
        assert_eq!(f.constrainedness(), num_rational::Ratio::from_integer(1));
        let g = build_graph(&f);
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
    }

    #[test]
    fn centrality_triangle_and_star() {
        let c = eigenvector_centrality(&triangle(), 1e-12, 10_000).unwrap();
        assert!(c.converged);
        for v in &c.values {
            assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        }
        // Star K_{1,3}: dominant eigenvector (sqrt 3, 1, 1, 1) / sqrt 6.
        let c = eigenvector_centrality(&star4(), 1e-13, 100_000).unwrap();
        assert!(c.converged);
        assert!((c.values[0] - 0.5f64.sqrt()).abs() < 1e-9);
        for v in &c.values[1..] {
            assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn centrality_errors_and_nonconvergence() {
        assert_eq!(
            eigenvector_centrality(&ClausalGraph::from_edges(3, []), 1e-9, 10),
            Err(NetError::Edgeless)
        );
        let path = ClausalGraph::from_edges(6, (0..5).map(|i| (i, i + 1)));
        let c = eigenvector_centrality(&path, 1e-15, 2).unwrap();
        assert!(!c.converged);
        assert_eq!(c.iterations, 2);
        assert!((c.values.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_values() {
        assert_eq!(avg_clustering(&triangle()), 1.0);
        assert_eq!(avg_clustering(&star4()), 0.0);
        // Triangle plus a pendant on node 0: c = [1/3, 1, 1, 0].
        let g = ClausalGraph::from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3)]);
        assert!((avg_clustering(&g) - (1.0 / 3.0 + 2.0) / 4.0).abs() < 1e-15);
        assert_eq!(avg_clustering(&ClausalGraph::from_edges(0, [])), 0.0);
    }

    #[test]
    fn path_length_values() {
        assert_eq!(avg_path_length(&triangle()), Ok(1.0));
        let path = ClausalGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert!((avg_path_length(&path).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        // Two disjoint edges: only the two connected pairs count.
        let split = ClausalGraph::from_edges(4, [(0, 1), (2, 3)]);
        assert_eq!(avg_path_length(&split), Ok(1.0));
        assert_eq!(
            avg_path_length(&ClausalGraph::from_edges(3, [])),
            Err(NetError::NoConnectedPairs)
        );
    }

    #[test]
    fn proximity_of_complete_graph() {
        let k5 =
            ClausalGraph::from_edges(5, (0..5u32).flat_map(|a| (a + 1..5).map(move |b| (a, b))));
        let expected = 1.0 / (0.8 / (5f64.ln() / 4f64.ln()));
        let mu = proximity_ratio(&k5).unwrap();
        assert!((mu - expected).abs() < 1e-12);
        assert!((mu - 1.451_2).abs() < 1e-4);
    }

    #[test]
    fn proximity_needs_mean_degree_above_one() {
        let g = ClausalGraph::from_edges(4, [(0, 1), (2, 3)]);
        assert_eq!(proximity_ratio(&g), Err(NetError::SparseDegree(1.0)));
    }

    #[test]
    fn histogram_shapes() {
        let h = centrality_histogram(&[0.5; 7], 4).unwrap();
        assert_eq!(h.counts, vec![7, 0, 0, 0]);
        assert_eq!(h.skewness, 0.0);
        let h = centrality_histogram(&[0.0, 1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(h.edges, vec![0.0, 2.0, 4.0]);
        assert_eq!(h.counts, vec![2, 3]);
        assert_eq!(
            h.to_csv(),
            "bin_lo,bin_hi,count\n0.000000,2.000000,2\n2.000000,4.000000,3\n"
        );
        assert_eq!(centrality_histogram(&[], 3), Err(NetError::EmptyHistogram));
        assert_eq!(
            centrality_histogram(&[1.0], 0),
            Err(NetError::EmptyHistogram)
        );
    }

    #[test]
    fn metrics_summary_of_edgeless_graph() {
        let m = NetworkMetrics::compute(&ClausalGraph::from_edges(4, []));
        assert_eq!(
            m.summary_line(),
            "n=4 edges=0 z=0.000000 C=0.000000 L=nan mu=nan skew=nan"
        );
        assert!(!m.converged());
    }

    #[test]
    fn metrics_summary_of_triangle() {
        let m = NetworkMetrics::compute(&triangle());
        assert!(m
            .summary_line()
            .starts_with("n=3 edges=3 z=2.000000 C=1.000000 L=1.000000 mu="));
        assert!(m.converged());
    }
}
