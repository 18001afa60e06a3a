//! Measures on the epsilon-neighborhood graph: Density, ClsCoef, Hubs.

use std::io::Write;

use fixedbitset::FixedBitSet;
use nalgebra::DMatrix;

use crate::dataset::Dataset;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

pub const DEFAULT_EPSILON: f64 = 0.15;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;
/// Relative gap below which two components' leading eigenvalues are equal.
const EIGEN_TIE: f64 = 1e-9;

/// Undirected graph linking same-class examples closer than `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonGraph {
    n: usize,
    epsilon: f64,
    /// `(i, j, distance)` with `i < j`, in lexicographic order.
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<FixedBitSet>,
}

impl EpsilonGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].count_ones(..)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].ones()
    }

    /// Writes one `i j weight` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for &(i, j, w) in &self.edges {
            writeln!(out, "{i} {j} {w}")?;
        }
        Ok(())
    }
}

/// Connects every pair with distance below `epsilon`, then drops the edges
/// whose endpoints carry different labels.
pub fn build_graph(dist: &DistanceMatrix, labels: &[usize], epsilon: f64) -> Result<EpsilonGraph> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let n = dist.n();
    let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = dist.get(i, j);
            if w < epsilon && labels[i] == labels[j] {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
                edges.push((i, j, w));
            }
        }
    }
    Ok(EpsilonGraph {
        n,
        epsilon,
        edges,
        adjacency,
    })
}

pub fn graph_of(d: &Dataset, epsilon: f64) -> Result<EpsilonGraph> {
    build_graph(&DistanceMatrix::from_view(&d.view()), d.labels(), epsilon)
}

/// Density: `1 - 2|E| / (n (n - 1))`.
pub fn density(g: &EpsilonGraph) -> Result<f64> {
    if g.n < 2 {
        return Err(Error::InvalidDataset(format!(
            "density needs at least 2 vertices, got {}",
            g.n
        )));
    }
    let n = g.n as f64;
    Ok(1.0 - 2.0 * g.edges.len() as f64 / (n * (n - 1.0)))
}

/// Fraction of possible links present among a vertex's neighbors; 0 for
/// degree below 2.
pub fn local_clustering(g: &EpsilonGraph, i: usize) -> f64 {
    let k = g.degree(i);
    if k < 2 {
        return 0.0;
    }
    let links: usize = g
        .neighbors(i)
        .map(|j| g.adjacency[j].intersection_count(&g.adjacency[i]))
        .sum::<usize>()
        / 2;
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// ClsCoef: one minus the mean local clustering coefficient.
pub fn clustering_coefficient(g: &EpsilonGraph) -> f64 {
    if g.n == 0 {
        return 1.0;
    }
    let total: f64 = (0..g.n).map(|i| local_clustering(g, i)).sum();
    1.0 - total / g.n as f64
}

/// Hub score of every vertex: the principal eigenvector of `A^T A`, scaled
/// so its largest entry is 1. `A` is symmetric, so this is the dominant
/// eigenvector of `A` itself. It is supported on the connected components
/// whose largest adjacency eigenvalue is maximal; vertices elsewhere score 0.
/// Each component is solved separately so that near-equal eigenvalues of
/// different components cannot stall the iteration. An edgeless graph
/// scores all zeros.
pub fn hub_scores(g: &EpsilonGraph) -> Vec<f64> {
    let mut scores = vec![0.0; g.n];
    let solved: Vec<(Vec<usize>, f64, Vec<f64>)> = components(g)
        .into_iter()
        .map(|members| {
            let (lambda, vector) = principal(g, &members);
            (members, lambda, vector)
        })
        .collect();
    let top = solved.iter().map(|s| s.1).fold(0.0, f64::max);
    for (members, lambda, vector) in solved {
        if lambda >= top - EIGEN_TIE * top.max(1.0) {
            for (&v, x) in members.iter().zip(vector) {
                scores[v] = x;
            }
        }
    }
    scores
}

/// Connected components that contain at least one edge, in order of their
/// lowest vertex, each listed in ascending order.
fn components(g: &EpsilonGraph) -> Vec<Vec<usize>> {
    let mut seen = FixedBitSet::with_capacity(g.n);
    let mut out = Vec::new();
    for start in 0..g.n {
        if seen.contains(start) || g.degree(start) == 0 {
            continue;
        }
        seen.insert(start);
        let mut members = vec![start];
        let mut next = 0;
        while next < members.len() {
            let v = members[next];
            next += 1;
            for u in g.neighbors(v) {
                if !seen.contains(u) {
                    seen.insert(u);
                    members.push(u);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Dominant adjacency eigenpair of one connected component, vector scaled to
/// a maximum of 1. Power iteration runs on `A + I`, which keeps it from
/// oscillating on bipartite components, and stops once the eigen-residual
/// falls below tolerance. If the iteration cap is reached the component is
/// diagonalized directly.
fn principal(g: &EpsilonGraph, members: &[usize]) -> (f64, Vec<f64>) {
    let k = members.len();
    let mut local = vec![usize::MAX; g.n];
    for (p, &v) in members.iter().enumerate() {
        local[v] = p;
    }
    let mut h = vec![1.0; k];
    for _ in 0..POWER_MAX_ITER {
        let next: Vec<f64> = members
            .iter()
            .enumerate()
            .map(|(p, &v)| h[p] + g.neighbors(v).map(|u| h[local[u]]).sum::<f64>())
            .collect();
        let mu = next.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>()
            / h.iter().map(|b| b * b).sum::<f64>();
        let residual = next
            .iter()
            .zip(&h)
            .map(|(a, b)| (a - mu * b).abs())
            .fold(0.0, f64::max);
        let top = next.iter().cloned().fold(0.0, f64::max);
        h = next.into_iter().map(|v| v / top).collect();
        if residual <= POWER_TOLERANCE * mu {
            return (mu - 1.0, h);
        }
    }
    log::debug!("hub-score power iteration hit {POWER_MAX_ITER} iterations; diagonalizing");
    let adjacency = DMatrix::from_fn(k, k, |a, b| {
        if g.has_edge(members[a], members[b]) {
            1.0
        } else {
            0.0
        }
    });
    let (values, vectors) = symmetric_eigen(adjacency);
    let column: Vec<f64> = vectors.column(0).iter().map(|v| v.abs()).collect();
    let top = column.iter().cloned().fold(0.0, f64::max);
    (values[0], column.into_iter().map(|v| v / top).collect())
}

/// Hubs: one minus the mean hub score.
pub fn hubs(g: &EpsilonGraph) -> f64 {
    if g.n == 0 {
        return 1.0;
    }
    let scores = hub_scores(g);
    1.0 - scores.iter().sum::<f64>() / g.n as f64
}
