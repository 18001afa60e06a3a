//! Measures derived from a soft-margin linear classifier: L1, L2, L3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{
    binary_encoding, Dataset, DatasetView, FeatureKind, NumericMatrix, OvoResult, PairValue,
};
use crate::error::Result;
use crate::svm::{self, LinearModel, SvmOptions};

/// A synthetic example on the segment between two same-class rows.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedSample {
    /// Encoded coordinates, same scaling as the rows it was drawn from.
    pub point: Vec<f64>,
    /// Base-dataset class index.
    pub label: usize,
    /// Base-dataset row indices of the two parents.
    pub parents: (usize, usize),
    /// Weight `a` in `a * x_i + (1 - a) * x_j`.
    pub coefficient: f64,
}

/// Generator for stochastic measures. Each computation gets its own stream
/// so that results do not depend on scheduling.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream used for the interpolation of a class pair.
pub(crate) fn pair_stream(d: &Dataset, pair: (usize, usize)) -> u64 {
    1 + (pair.0 * d.n_classes() + pair.1) as u64
}

/// Splits `count` across classes in proportion to `class_sizes`, largest
/// remainder first (ties to the lower class index).
fn proportional_counts(class_sizes: &[usize], count: usize) -> Vec<usize> {
    let total: usize = class_sizes.iter().sum();
    if total == 0 {
        return vec![0; class_sizes.len()];
    }
    let mut counts: Vec<usize> = class_sizes.iter().map(|&s| s * count / total).collect();
    let mut remainders: Vec<(usize, usize)> = class_sizes
        .iter()
        .enumerate()
        .map(|(c, &s)| (s * count % total, c))
        .collect();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = count - counts.iter().sum::<usize>();
    for &(_, c) in remainders.iter().take(missing) {
        counts[c] += 1;
    }
    counts
}

/// Interpolates `count` samples from encoded rows. `rows[k]` is the base row
/// index of encoded row `k`, `labels[k]` its class. Numeric coordinates are
/// convex combinations; symbolic coordinates copy one parent at random.
pub(crate) fn interpolate_encoded<R: Rng>(
    x: &NumericMatrix,
    rows: &[usize],
    labels: &[usize],
    n_classes: usize,
    count: usize,
    rng: &mut R,
) -> Vec<InterpolatedSample> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (k, &l) in labels.iter().enumerate() {
        members[l].push(k);
    }
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let per_class = proportional_counts(&sizes, count);
    let mut samples = Vec::with_capacity(count);
    for (class, &quota) in per_class.iter().enumerate() {
        let pool = &members[class];
        for _ in 0..quota {
            let pi = rng.random_range(0..pool.len());
            let pj = if pool.len() > 1 {
                // a distinct second parent
                let pj = rng.random_range(0..pool.len() - 1);
                pj + usize::from(pj >= pi)
            } else {
                pi
            };
            let (i, j) = (pool[pi], pool[pj]);
            let a: f64 = rng.random();
            let point = x
                .row(i)
                .iter()
                .zip(x.row(j))
                .zip(x.kinds())
                .map(|((&u, &v), kind)| match kind {
                    FeatureKind::Numeric => a * u + (1.0 - a) * v,
                    FeatureKind::Symbolic => {
                        if rng.random_bool(0.5) {
                            u
                        } else {
                            v
                        }
                    }
                })
                .collect();
            samples.push(InterpolatedSample {
                point,
                label: class,
                parents: (rows[i], rows[j]),
                coefficient: a,
            });
        }
    }
    samples
}

/// Draws `count` interpolated samples from a view's scaled encoding, with
/// class proportions matching the view.
pub fn interpolate(view: &DatasetView<'_>, count: usize, seed: u64) -> Vec<InterpolatedSample> {
    let x = view.to_numeric();
    let stream = view.class_pair().map_or(0, |p| pair_stream(view.base(), p));
    interpolate_encoded(
        &x,
        view.rows(),
        &view.labels(),
        view.base().n_classes(),
        count,
        &mut seeded_rng(seed, stream),
    )
}

/// A linear model trained on one class pair together with its training
/// encoding. The first class of the pair is labeled `-1`, the second `+1`.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub classes: (usize, usize),
    pub rows: Vec<usize>,
    pub encoded: NumericMatrix,
    pub targets: Vec<f64>,
    pub model: LinearModel,
}

impl LinearFit {
    pub fn new(view: &DatasetView<'_>, c: f64) -> Result<Self> {
        let (encoded, second) = binary_encoding(view)?;
        let labels = view.labels();
        let first = labels[second
            .iter()
            .position(|&s| !s)
            .expect("both classes present")];
        let other = labels[second
            .iter()
            .position(|&s| s)
            .expect("both classes present")];
        let targets: Vec<f64> = second.iter().map(|&s| if s { 1.0 } else { -1.0 }).collect();
        let model = svm::train(&encoded, &targets, &SvmOptions::with_c(c))?;
        Ok(Self {
            classes: (first, other),
            rows: view.rows().to_vec(),
            encoded,
            targets,
            model,
        })
    }

    /// Largest violation of stationarity, `|w - sum a_i y_i x_i|`, and of the
    /// complementary-slackness conditions on the training set.
    pub fn kkt_residual(&self) -> f64 {
        let m = self.encoded.n_cols();
        let model = &self.model;
        let mut w = vec![0.0; m];
        for (i, (&a, &y)) in model.multipliers.iter().zip(&self.targets).enumerate() {
            for (wk, &xk) in w.iter_mut().zip(self.encoded.row(i)) {
                *wk += a * y * xk;
            }
        }
        let mut worst = w
            .iter()
            .zip(&model.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let c = model.regularization;
        for (i, &a) in model.multipliers.iter().enumerate() {
            let margin = self.targets[i] * model.decision(self.encoded.row(i));
            let violation = if a <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if a >= c {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            };
            worst = worst.max(violation);
        }
        worst
    }

    /// L1: `S / (1 + S)` with `S` the mean slack over the training rows.
    pub fn l1(&self) -> f64 {
        let n = self.model.slacks.len() as f64;
        let s = self.model.slacks.iter().sum::<f64>() / n;
        s / (1.0 + s)
    }

    /// L2: training error rate; points on the hyperplane are errors.
    pub fn l2(&self) -> f64 {
        let errors = (0..self.encoded.n_rows())
            .filter(|&i| !self.model.is_correct(self.encoded.row(i), self.targets[i]))
            .count();
        errors as f64 / self.encoded.n_rows() as f64
    }

    /// L3: error rate on `n` samples interpolated within each class.
    pub fn l3<R: Rng>(&self, base: &Dataset, rng: &mut R) -> f64 {
        let labels: Vec<usize> = self.rows.iter().map(|&r| base.labels()[r]).collect();
        let samples = interpolate_encoded(
            &self.encoded,
            &self.rows,
            &labels,
            base.n_classes(),
            self.rows.len(),
            rng,
        );
        let errors = samples
            .iter()
            .filter(|s| {
                let y = if s.label == self.classes.1 { 1.0 } else { -1.0 };
                !self.model.is_correct(&s.point, y)
            })
            .count();
        errors as f64 / samples.len() as f64
    }
}

/// Trains the soft-margin classifier on a two-class view.
pub fn train_linear(view: &DatasetView<'_>, c: f64) -> Result<LinearModel> {
    Ok(LinearFit::new(view, c)?.model)
}

/// One fit per class pair, in pair order.
pub fn fit_pairs(d: &Dataset, c: f64) -> Result<Vec<LinearFit>> {
    d.ovo_views()?
        .par_iter()
        .map(|v| LinearFit::new(v, c))
        .collect()
}

fn aggregate(fits: &[LinearFit], value: impl Fn(&LinearFit) -> f64) -> Result<OvoResult> {
    OvoResult::from_pairs(
        fits.iter()
            .map(|f| PairValue {
                classes: f.classes,
                value: value(f),
            })
            .collect(),
    )
}

pub fn l1_from_fits(fits: &[LinearFit]) -> Result<OvoResult> {
    aggregate(fits, LinearFit::l1)
}

pub fn l2_from_fits(fits: &[LinearFit]) -> Result<OvoResult> {
    aggregate(fits, LinearFit::l2)
}

pub fn l3_from_fits(d: &Dataset, fits: &[LinearFit], seed: u64) -> Result<OvoResult> {
    aggregate(fits, |f| {
        f.l3(d, &mut seeded_rng(seed, pair_stream(d, f.classes)))
    })
}

pub fn l1_pair(view: &DatasetView<'_>, c: f64) -> Result<f64> {
    Ok(LinearFit::new(view, c)?.l1())
}

pub fn l2_pair(view: &DatasetView<'_>, c: f64) -> Result<f64> {
    Ok(LinearFit::new(view, c)?.l2())
}

pub fn l3_pair(view: &DatasetView<'_>, c: f64, seed: u64) -> Result<f64> {
    let fit = LinearFit::new(view, c)?;
    let mut rng = seeded_rng(seed, pair_stream(view.base(), fit.classes));
    Ok(fit.l3(view.base(), &mut rng))
}

pub fn l1(d: &Dataset, c: f64) -> Result<OvoResult> {
    l1_from_fits(&fit_pairs(d, c)?)
}

pub fn l2(d: &Dataset, c: f64) -> Result<OvoResult> {
    l2_from_fits(&fit_pairs(d, c)?)
}

pub fn l3(d: &Dataset, c: f64, seed: u64) -> Result<OvoResult> {
    l3_from_fits(d, &fit_pairs(d, c)?, seed)
}
