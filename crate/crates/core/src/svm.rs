//! Soft-margin linear SVM trained in the dual.
//!
//! Minimizes `0.5 |w|^2 + C sum(eps_i)` subject to
//! `y_i (w . x_i + b) >= 1 - eps_i`, `eps_i >= 0`, by pairwise coordinate
//! ascent on the box-constrained dual `0 <= alpha_i <= C`, `sum alpha_i y_i = 0`
//! (maximal-violating pair with second-order working-set selection).
//! Kernel rows are cached within a fixed memory budget, so a step costs
//! `O(n)` once the rows of the active examples are resident. Training stops
//! once the maximal KKT violation, re-checked against a gradient rebuilt
//! from scratch, drops below tolerance.

use std::collections::VecDeque;
use std::rc::Rc;

use crate::dataset::NumericMatrix;
use crate::error::{Error, Result};

/// Defaults for [`SvmOptions`].
pub const DEFAULT_C: f64 = 100.0;
pub const DEFAULT_VIOLATION_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_EPOCHS: usize = 10_000;

const TAU: f64 = 1e-12;

/// Kernel-row cache budget, in matrix entries.
const CACHE_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmOptions {
    pub c: f64,
    /// Required maximal KKT violation at termination.
    pub violation_tolerance: f64,
    /// One epoch is `n` pair updates.
    pub max_epochs: usize,
}

impl Default for SvmOptions {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            violation_tolerance: DEFAULT_VIOLATION_TOLERANCE,
            max_epochs: DEFAULT_MAX_EPOCHS,
        }
    }
}

impl SvmOptions {
    pub fn with_c(c: f64) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// `max(0, 1 - y_i (w . x_i + b))` for every training example.
    pub slacks: Vec<f64>,
    /// Dual multipliers `alpha_i`.
    pub multipliers: Vec<f64>,
    pub regularization: f64,
    pub converged: bool,
    pub iterations: usize,
    pub duality_gap: f64,
}

impl LinearModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Whether `x` is classified correctly for label `y` in `{-1, +1}`.
    /// Points on the hyperplane count as errors.
    pub fn is_correct(&self, x: &[f64], y: f64) -> bool {
        y * self.decision(x) > 0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Rows of the linear kernel `K_it = x_i . x_t`, evicted oldest first.
struct KernelCache {
    rows: Vec<Option<Rc<[f64]>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl KernelCache {
    fn new(n: usize) -> Self {
        Self {
            rows: vec![None; n],
            order: VecDeque::new(),
            capacity: (CACHE_ENTRIES / n.max(1)).max(2),
        }
    }

    fn row(&mut self, x: &NumericMatrix, i: usize) -> Rc<[f64]> {
        if let Some(row) = &self.rows[i] {
            return Rc::clone(row);
        }
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows[old] = None;
            }
        }
        let xi = x.row(i);
        let row: Rc<[f64]> = (0..x.n_rows()).map(|t| dot(xi, x.row(t))).collect();
        self.rows[i] = Some(Rc::clone(&row));
        self.order.push_back(i);
        row
    }
}

struct Solver<'a> {
    x: &'a NumericMatrix,
    y: &'a [f64],
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    w: Vec<f64>,
    diag: Vec<f64>,
    cache: KernelCache,
}

impl<'a> Solver<'a> {
    fn new(x: &'a NumericMatrix, y: &'a [f64], c: f64) -> Self {
        let n = x.n_rows();
        Self {
            x,
            y,
            c,
            alpha: vec![0.0; n],
            grad: vec![-1.0; n],
            w: vec![0.0; x.n_cols()],
            diag: (0..n).map(|i| dot(x.row(i), x.row(i))).collect(),
            cache: KernelCache::new(n),
        }
    }

    fn at_upper(&self, i: usize) -> bool {
        self.alpha[i] >= self.c
    }

    fn at_lower(&self, i: usize) -> bool {
        self.alpha[i] <= 0.0
    }

    /// Second-order working-set selection. Returns the pair and the maximal
    /// KKT violation, or `None` when no pair improves the objective.
    fn select(&mut self) -> (Option<(usize, usize)>, f64) {
        let n = self.alpha.len();
        let mut gmax = f64::NEG_INFINITY;
        let mut first = None;
        for t in 0..n {
            let candidate = if self.y[t] > 0.0 {
                (!self.at_upper(t)).then(|| -self.grad[t])
            } else {
                (!self.at_lower(t)).then(|| self.grad[t])
            };
            if let Some(g) = candidate {
                if g >= gmax {
                    gmax = g;
                    first = Some(t);
                }
            }
        }
        let Some(i) = first else {
            return (None, 0.0);
        };

        let ki = self.cache.row(self.x, i);
        let mut gmax2 = f64::NEG_INFINITY;
        let mut second = None;
        let mut best = f64::INFINITY;
        for t in 0..n {
            let (eligible, g) = if self.y[t] > 0.0 {
                (!self.at_lower(t), self.grad[t])
            } else {
                (!self.at_upper(t), -self.grad[t])
            };
            if !eligible {
                continue;
            }
            gmax2 = gmax2.max(g);
            let diff = gmax + g;
            if diff > 0.0 {
                let quad = self.diag[i] + self.diag[t] - 2.0 * ki[t];
                let quad = if quad > 0.0 { quad } else { TAU };
                let gain = -(diff * diff) / quad;
                if gain <= best {
                    best = gain;
                    second = Some(t);
                }
            }
        }
        let violation = gmax + gmax2;
        match second {
            Some(j) => (Some((i, j)), violation),
            None => (None, violation.max(0.0)),
        }
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let ki = self.cache.row(self.x, i);
        let kj = self.cache.row(self.x, j);
        let k_ij = ki[j];
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if self.y[i] != self.y[j] {
            let quad = self.diag[i] + self.diag[j] - 2.0 * k_ij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = self.diag[i] + self.diag[j] - 2.0 * k_ij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.alpha[i] = ai.clamp(0.0, c);
        self.alpha[j] = aj.clamp(0.0, c);

        let di = (self.alpha[i] - old_i) * self.y[i];
        let dj = (self.alpha[j] - old_j) * self.y[j];
        for t in 0..self.grad.len() {
            self.grad[t] += self.y[t] * (di * ki[t] + dj * kj[t]);
        }
    }

    /// `G_t = y_t (w . x_t) - 1`.
    fn refresh_gradient(&mut self) {
        for t in 0..self.alpha.len() {
            self.grad[t] = self.y[t] * dot(&self.w, self.x.row(t)) - 1.0;
        }
    }

    /// Rebuilds `w` and the gradient from the multipliers, shedding the
    /// rounding accumulated by incremental updates.
    fn rebuild_weights(&mut self) {
        self.w.iter_mut().for_each(|v| *v = 0.0);
        for t in 0..self.alpha.len() {
            if self.alpha[t] != 0.0 {
                axpy(self.alpha[t] * self.y[t], self.x.row(t), &mut self.w);
            }
        }
        self.refresh_gradient();
    }

    /// Bias from the KKT conditions: mean over free multipliers, otherwise
    /// the midpoint of the feasible interval.
    fn bias(&self) -> f64 {
        let mut upper = f64::INFINITY;
        let mut lower = f64::NEG_INFINITY;
        let mut free_sum = 0.0;
        let mut free = 0usize;
        for t in 0..self.alpha.len() {
            let yg = self.y[t] * self.grad[t];
            if self.at_upper(t) {
                if self.y[t] < 0.0 {
                    upper = upper.min(yg);
                } else {
                    lower = lower.max(yg);
                }
            } else if self.at_lower(t) {
                if self.y[t] > 0.0 {
                    upper = upper.min(yg);
                } else {
                    lower = lower.max(yg);
                }
            } else {
                free += 1;
                free_sum += yg;
            }
        }
        let rho = if free > 0 {
            free_sum / free as f64
        } else if upper.is_finite() && lower.is_finite() {
            0.5 * (upper + lower)
        } else if upper.is_finite() {
            upper
        } else if lower.is_finite() {
            lower
        } else {
            0.0
        };
        -rho
    }

    fn slacks(&self, bias: f64) -> Vec<f64> {
        (0..self.alpha.len())
            .map(|t| (1.0 - self.y[t] * (dot(&self.w, self.x.row(t)) + bias)).max(0.0))
            .collect()
    }

    fn duality_gap(&self, bias: f64) -> f64 {
        let norm_sq = dot(&self.w, &self.w);
        let primal = 0.5 * norm_sq + self.c * self.slacks(bias).iter().sum::<f64>();
        let dual = self.alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        primal - dual
    }
}

/// Trains on rows of `x` with labels `y` in `{-1, +1}`.
pub fn train(x: &NumericMatrix, y: &[f64], options: &SvmOptions) -> Result<LinearModel> {
    let n = x.n_rows();
    if y.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} labels for {n} rows",
            y.len()
        )));
    }
    if !(options.c > 0.0 && options.c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "regularization C must be positive, got {}",
            options.c
        )));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter("labels must be -1 or +1".into()));
    }
    for (sign, name) in [(1.0, "positive"), (-1.0, "negative")] {
        if !y.contains(&sign) {
            return Err(Error::ClassTooSmall {
                class: name.into(),
                size: 0,
                required: 1,
            });
        }
    }

    let mut solver = Solver::new(x, y, options.c);
    let max_iterations = options.max_epochs.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut converged = false;
    let mut fresh = true;
    loop {
        let (pair, violation) = solver.select();
        if pair.is_none() || violation <= options.violation_tolerance {
            if fresh {
                converged = true;
                break;
            }
            solver.rebuild_weights();
            fresh = true;
            continue;
        }
        if iterations >= max_iterations {
            break;
        }
        let (i, j) = pair.expect("checked above");
        solver.update(i, j);
        fresh = false;
        iterations += 1;
    }
    if !converged {
        log::warn!("linear SVM stopped after {iterations} updates without converging");
    }

    solver.rebuild_weights();
    let bias = solver.bias();
    Ok(LinearModel {
        slacks: solver.slacks(bias),
        duality_gap: solver.duality_gap(bias),
        weights: solver.w.clone(),
        bias,
        multipliers: solver.alpha,
        regularization: options.c,
        converged,
        iterations,
    })
}
