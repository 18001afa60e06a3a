//! Neighborhood measures over the Gower distance matrix: N1, N2, N3, N4, T1
//! and LSC. All of them handle any number of classes directly.

use rayon::prelude::*;

use crate::dataset::{Dataset, NumericMatrix};
use crate::distance::{gower_rows, DistanceMatrix};
use crate::error::{Error, Result};
use crate::linearity::{interpolate_encoded, seeded_rng};

/// Containment slack used when comparing sphere extents.
const SPHERE_TOLERANCE: f64 = 1e-12;

fn require_two_classes(d: &Dataset) -> Result<()> {
    if d.n_classes() < 2 {
        return Err(Error::TooFewClasses {
            required: 2,
            found: d.n_classes(),
        });
    }
    Ok(())
}

/// Closest example of another class to row `i`, ties to the lowest index.
pub fn nearest_enemy(dist: &DistanceMatrix, labels: &[usize], i: usize) -> Result<(usize, f64)> {
    let row = dist.row(i);
    let mut best: Option<(usize, f64)> = None;
    for (j, &dj) in row.iter().enumerate() {
        if labels[j] != labels[i] && best.is_none_or(|(_, b)| dj < b) {
            best = Some((j, dj));
        }
    }
    best.ok_or(Error::TooFewClasses {
        required: 2,
        found: 1,
    })
}

/// Nearest enemy of every row.
pub fn nearest_enemies(dist: &DistanceMatrix, labels: &[usize]) -> Result<Vec<(usize, f64)>> {
    (0..dist.n())
        .into_par_iter()
        .map(|i| nearest_enemy(dist, labels, i))
        .collect()
}

/// Closest other row of the same class, ties to the lowest index.
fn nearest_friend(dist: &DistanceMatrix, labels: &[usize], i: usize) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &dj) in dist.row(i).iter().enumerate() {
        if j != i && labels[j] == labels[i] && best.is_none_or(|(_, b)| dj < b) {
            best = Some((j, dj));
        }
    }
    best
}

/// Closest other row regardless of class, ties to the lowest index.
fn nearest_neighbor(dist: &DistanceMatrix, i: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &dj) in dist.row(i).iter().enumerate() {
        if j != i && best.is_none_or(|(_, b)| dj < b) {
            best = Some((j, dj));
        }
    }
    best.map(|(j, _)| j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimumSpanningTree {
    /// `(parent, child, weight)` in the order vertices joined the tree.
    pub edges: Vec<(usize, usize, f64)>,
}

impl MinimumSpanningTree {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

/// Prim's algorithm from vertex 0 on the complete distance graph. The next
/// vertex is the cheapest one to attach (lowest index on ties), and it hangs
/// off the lowest-index tree vertex achieving that cost.
pub fn minimum_spanning_tree(dist: &DistanceMatrix) -> MinimumSpanningTree {
    let n = dist.n();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return MinimumSpanningTree { edges };
    }
    let mut in_tree = vec![false; n];
    let mut cost = vec![f64::INFINITY; n];
    let mut parent = vec![0usize; n];
    in_tree[0] = true;
    for (j, &d) in dist.row(0).iter().enumerate() {
        cost[j] = d;
    }
    for _ in 1..n {
        let mut next = None;
        for v in 0..n {
            if !in_tree[v] && next.is_none_or(|u: usize| cost[v] < cost[u]) {
                next = Some(v);
            }
        }
        let v = next.expect("a vertex remains outside the tree");
        in_tree[v] = true;
        edges.push((parent[v], v, cost[v]));
        for (u, &d) in dist.row(v).iter().enumerate() {
            if !in_tree[u] && (d < cost[u] || (d == cost[u] && v < parent[u])) {
                cost[u] = d;
                parent[u] = v;
            }
        }
    }
    MinimumSpanningTree { edges }
}

/// N1: fraction of vertices touching a minimum-spanning-tree edge whose
/// endpoints have different labels.
pub fn n1_with(dist: &DistanceMatrix, labels: &[usize]) -> f64 {
    let n = dist.n();
    if n == 0 {
        return 0.0;
    }
    let mst = minimum_spanning_tree(dist);
    let mut border = vec![false; n];
    for &(a, b, _) in &mst.edges {
        if labels[a] != labels[b] {
            border[a] = true;
            border[b] = true;
        }
    }
    border.iter().filter(|&&b| b).count() as f64 / n as f64
}

pub fn n1(d: &Dataset) -> f64 {
    n1_with(&DistanceMatrix::from_view(&d.view()), d.labels())
}

/// N2: `r / (1 + r)` where `r` is the sum of nearest same-class distances
/// over the sum of nearest-enemy distances. Rows alone in their class add
/// nothing to the first sum; a zero enemy sum gives 1.
pub fn n2_with(dist: &DistanceMatrix, labels: &[usize]) -> Result<f64> {
    let enemies = nearest_enemies(dist, labels)?;
    let intra: f64 = (0..dist.n())
        .map(|i| nearest_friend(dist, labels, i).map_or(0.0, |(_, d)| d))
        .sum();
    let extra: f64 = enemies.iter().map(|e| e.1).sum();
    if extra == 0.0 {
        return Ok(1.0);
    }
    let ratio = intra / extra;
    Ok(ratio / (1.0 + ratio))
}

pub fn n2(d: &Dataset) -> Result<f64> {
    require_two_classes(d)?;
    n2_with(&DistanceMatrix::from_view(&d.view()), d.labels())
}

/// N3: leave-one-out error rate of the 1-nearest-neighbor classifier.
pub fn n3_with(dist: &DistanceMatrix, labels: &[usize]) -> f64 {
    let n = dist.n();
    if n < 2 {
        return 0.0;
    }
    let errors = (0..n)
        .into_par_iter()
        .filter(|&i| nearest_neighbor(dist, i).is_some_and(|j| labels[j] != labels[i]))
        .count();
    errors as f64 / n as f64
}

pub fn n3(d: &Dataset) -> f64 {
    n3_with(&DistanceMatrix::from_view(&d.view()), d.labels())
}

/// N4: error rate of 1NN over the original rows when classifying `n`
/// samples interpolated within each class.
pub fn n4_with(d: &Dataset, encoded: &NumericMatrix, seed: u64) -> f64 {
    let n = encoded.n_rows();
    if n < 2 {
        return 0.0;
    }
    let rows: Vec<usize> = (0..n).collect();
    let samples = interpolate_encoded(
        encoded,
        &rows,
        d.labels(),
        d.n_classes(),
        n,
        &mut seeded_rng(seed, 0),
    );
    let kinds = encoded.kinds();
    let errors = samples
        .par_iter()
        .filter(|s| {
            let mut best = (0usize, f64::INFINITY);
            for k in 0..n {
                let dk = gower_rows(&s.point, encoded.row(k), kinds);
                if dk < best.1 {
                    best = (k, dk);
                }
            }
            d.labels()[best.0] != s.label
        })
        .count();
    errors as f64 / samples.len() as f64
}

pub fn n4(d: &Dataset, seed: u64) -> f64 {
    n4_with(d, &d.to_numeric(), seed)
}

/// Spheres grown from every example until they touch a sphere of another
/// class, after removing spheres contained in a same-class sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersphereCover {
    pub radius: Vec<f64>,
    pub absorbed: Vec<bool>,
}

impl HypersphereCover {
    pub fn survivors(&self) -> usize {
        self.absorbed.iter().filter(|&&a| !a).count()
    }
}

/// Radius of each sphere: half the distance for mutual nearest enemies,
/// otherwise the enemy distance minus the enemy's own radius (at least 0).
fn sphere_radii(enemies: &[(usize, f64)]) -> Vec<f64> {
    let n = enemies.len();
    let mut radius: Vec<Option<f64>> = vec![None; n];
    for start in 0..n {
        if radius[start].is_some() {
            continue;
        }
        let mut chain = vec![start];
        let mut base = loop {
            let i = *chain.last().expect("chain is non-empty");
            let (e, di) = enemies[i];
            if let Some(r) = radius[e] {
                break (di - r).max(0.0);
            }
            if enemies[e].0 == i || chain.len() > n {
                break di / 2.0;
            }
            chain.push(e);
        };
        radius[chain.pop().expect("chain is non-empty")] = Some(base);
        while let Some(i) = chain.pop() {
            base = (enemies[i].1 - base).max(0.0);
            radius[i] = Some(base);
        }
    }
    radius
        .into_iter()
        .map(|r| r.expect("every radius assigned"))
        .collect()
}

pub fn hypersphere_cover(dist: &DistanceMatrix, labels: &[usize]) -> Result<HypersphereCover> {
    let enemies = nearest_enemies(dist, labels)?;
    let radius = sphere_radii(&enemies);
    let n = dist.n();
    let absorbed = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n).any(|j| {
                if j == i || labels[j] != labels[i] {
                    return false;
                }
                let dij = dist.get(i, j);
                let inside = dij + radius[i] <= radius[j] + SPHERE_TOLERANCE;
                let identical =
                    dij <= SPHERE_TOLERANCE && (radius[i] - radius[j]).abs() <= SPHERE_TOLERANCE;
                inside && (!identical || j < i)
            })
        })
        .collect();
    Ok(HypersphereCover { radius, absorbed })
}

/// T1: surviving spheres over `n`.
pub fn t1_with(dist: &DistanceMatrix, labels: &[usize]) -> Result<f64> {
    let cover = hypersphere_cover(dist, labels)?;
    Ok(cover.survivors() as f64 / dist.n() as f64)
}

pub fn t1(d: &Dataset) -> Result<f64> {
    require_two_classes(d)?;
    t1_with(&DistanceMatrix::from_view(&d.view()), d.labels())
}

/// Size of each example's local set: the examples strictly closer than its
/// nearest enemy, itself included.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSetTable {
    pub cardinality: Vec<usize>,
}

pub fn local_sets(dist: &DistanceMatrix, labels: &[usize]) -> Result<LocalSetTable> {
    let enemies = nearest_enemies(dist, labels)?;
    let cardinality = (0..dist.n())
        .into_par_iter()
        .map(|i| {
            let radius = enemies[i].1;
            1 + dist
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, &dj)| j != i && dj < radius)
                .count()
        })
        .collect();
    Ok(LocalSetTable { cardinality })
}

/// LSC: `1 - sum |LS| / n^2`.
pub fn lsc_with(dist: &DistanceMatrix, labels: &[usize]) -> Result<f64> {
    let table = local_sets(dist, labels)?;
    let n = dist.n() as f64;
    Ok(1.0 - table.cardinality.iter().sum::<usize>() as f64 / (n * n))
}

pub fn lsc(d: &Dataset) -> Result<f64> {
    require_two_classes(d)?;
    lsc_with(&DistanceMatrix::from_view(&d.view()), d.labels())
}
