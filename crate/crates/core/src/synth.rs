//! Seeded synthetic datasets: Gaussian clusters, concentric rings, an
//! alternating line, and label-noise injection.

use std::f64::consts::TAU;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{Dataset, FeatureColumn};
use crate::error::{Error, Result};

pub const LABEL_NAME: &str = "class";

pub fn class_name(c: usize) -> String {
    format!("c{c}")
}

fn feature_name(j: usize) -> String {
    format!("x{j}")
}

fn assemble(columns: Vec<Vec<f64>>, labels: &[String]) -> Result<Dataset> {
    let columns = columns
        .into_iter()
        .enumerate()
        .map(|(j, c)| FeatureColumn::numeric(feature_name(j), c))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(columns, LABEL_NAME, labels)
}

/// Gaussian blobs in the plane. Class `c` is centered at
/// `(c * separation, c * separation)` with standard deviation `spread` per
/// coordinate.
pub fn make_clusters(
    n_per_class: usize,
    n_classes: usize,
    separation: f64,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    make_clusters_nd(n_per_class, n_classes, 2, separation, spread, seed)
}

/// Gaussian blobs in `dims` dimensions, class centers spaced along the
/// main diagonal.
pub fn make_clusters_nd(
    n_per_class: usize,
    n_classes: usize,
    dims: usize,
    separation: f64,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "separation must be positive, got {separation}"
        )));
    }
    if n_classes == 0 || n_per_class == 0 || dims == 0 {
        return Err(Error::InvalidParameter(
            "cluster counts and dimension must be positive".into(),
        ));
    }
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "spread must be non-negative, got {spread}"
        )));
    }
    let noise = Normal::new(0.0, spread).expect("spread checked above");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![Vec::with_capacity(n_per_class * n_classes); dims];
    let mut labels = Vec::with_capacity(n_per_class * n_classes);
    for c in 0..n_classes {
        let center = c as f64 * separation;
        for _ in 0..n_per_class {
            for col in columns.iter_mut() {
                col.push(center + noise.sample(&mut rng));
            }
            labels.push(class_name(c));
        }
    }
    assemble(columns, &labels)
}

/// Points on concentric circles, one class per radius. Angles are evenly
/// spaced with a uniform jitter of up to one step.
pub fn make_rings(n_per_class: usize, radii: &[f64], seed: u64) -> Result<Dataset> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter(
            "at least two radii required".into(),
        ));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::InvalidParameter(format!("invalid radius {r}")));
    }
    for (i, a) in radii.iter().enumerate() {
        if radii[i + 1..].contains(a) {
            return Err(Error::InvalidParameter(format!("radius {a} repeated")));
        }
    }
    if n_per_class == 0 {
        return Err(Error::InvalidParameter(
            "n_per_class must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = TAU / n_per_class as f64;
    let (mut xs, mut ys, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for (c, &r) in radii.iter().enumerate() {
        for k in 0..n_per_class {
            let angle = step * (k as f64 + rng.random::<f64>());
            xs.push(r * angle.cos());
            ys.push(r * angle.sin());
            labels.push(class_name(c));
        }
    }
    assemble(vec![xs, ys], &labels)
}

/// Points `0, 1, ..., n-1` on a line with labels alternating between two
/// classes.
pub fn alternating_line(n: usize) -> Result<Dataset> {
    let values = (0..n).map(|i| i as f64).collect();
    let labels: Vec<String> = (0..n).map(|i| class_name(i % 2)).collect();
    assemble(vec![values], &labels)
}

/// Random mixed-type table for stress testing. Every class appears at least
/// once. Roughly a third of the features are symbolic (2 to 4 categories
/// named `s0`, `s1`, ...); numeric features carry a per-class shift, and some
/// are rounded to integers or held constant to produce ties.
pub fn random_mixed(n: usize, m: usize, n_classes: usize, seed: u64) -> Result<Dataset> {
    if n_classes == 0 || m == 0 || n < n_classes {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1 and n >= n_classes >= 1, got n={n}, m={m}, n_classes={n_classes}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            if i < n_classes {
                i
            } else {
                rng.random_range(0..n_classes)
            }
        })
        .collect();
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut columns = Vec::with_capacity(m);
    for j in 0..m {
        let name = feature_name(j);
        let roll: f64 = rng.random();
        if roll < 0.3 {
            let k = rng.random_range(2..=4);
            let values: Vec<String> = labels
                .iter()
                .map(|&l| {
                    let code = if rng.random_bool(0.5) {
                        l % k
                    } else {
                        rng.random_range(0..k)
                    };
                    format!("s{code}")
                })
                .collect();
            columns.push(FeatureColumn::symbolic(name, &values));
        } else if roll < 0.33 {
            columns.push(FeatureColumn::numeric(name, vec![1.0; n])?);
        } else {
            let shifts: Vec<f64> = (0..n_classes)
                .map(|_| 2.0 * noise.sample(&mut rng))
                .collect();
            let integral = rng.random_bool(0.2);
            let values = labels
                .iter()
                .map(|&l| {
                    let v = shifts[l] + noise.sample(&mut rng);
                    if integral {
                        v.round()
                    } else {
                        v
                    }
                })
                .collect();
            columns.push(FeatureColumn::numeric(name, values)?);
        }
    }
    let names: Vec<String> = labels.iter().map(|&l| class_name(l)).collect();
    Dataset::new(columns, LABEL_NAME, &names)
}

/// Moves `round(fraction * n)` uniformly chosen examples to a different,
/// uniformly chosen class.
pub fn flip_labels(d: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!(
            "fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let nc = d.n_classes();
    let count = (fraction * d.n() as f64).round() as usize;
    if count > 0 && nc < 2 {
        return Err(Error::TooFewClasses {
            required: 2,
            found: nc,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = d.labels().to_vec();
    let mut chosen = sample(&mut rng, d.n(), count).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        let shift = rng.random_range(1..nc);
        labels[i] = (labels[i] + shift) % nc;
    }
    let names: Vec<&str> = labels
        .iter()
        .map(|&l| d.class_names()[l].as_str())
        .collect();
    Dataset::new(d.columns().to_vec(), d.label_name(), &names)
}
