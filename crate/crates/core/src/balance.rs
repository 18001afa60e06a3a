//! Class-imbalance measures C1 and C2.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

fn check_counts(counts: &[usize]) -> Result<usize> {
    let present = counts.iter().filter(|&&c| c > 0).count();
    if counts.len() < 2 || present < 2 {
        return Err(Error::TooFewClasses {
            required: 2,
            found: present,
        });
    }
    Ok(counts.iter().sum())
}

/// Entropy of the class proportions divided by `ln n_c`: 1 for balanced
/// classes, approaching 0 as one class dominates.
pub fn normalized_entropy(counts: &[usize]) -> Result<f64> {
    let n = check_counts(counts)? as f64;
    let entropy: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok((entropy / (counts.len() as f64).ln()).clamp(0.0, 1.0))
}

/// C1: one minus the normalized class entropy.
pub fn c1_from_counts(counts: &[usize]) -> Result<f64> {
    Ok(1.0 - normalized_entropy(counts)?)
}

/// Multiclass imbalance ratio, 1 for balanced classes.
pub fn imbalance_ratio(counts: &[usize]) -> Result<f64> {
    let n = check_counts(counts)?;
    if let Some(index) = counts.iter().position(|&c| c == n) {
        return Err(Error::DominantClass(format!("#{index}")));
    }
    let nc = counts.len() as f64;
    let sum: f64 = counts.iter().map(|&c| c as f64 / (n - c) as f64).sum();
    Ok((nc - 1.0) / nc * sum)
}

/// C2: `1 - 1/IR`.
pub fn c2_from_counts(counts: &[usize]) -> Result<f64> {
    Ok(1.0 - 1.0 / imbalance_ratio(counts)?)
}

pub fn c1(d: &Dataset) -> Result<f64> {
    c1_from_counts(d.class_counts())
}

pub fn c2(d: &Dataset) -> Result<f64> {
    c2_from_counts(d.class_counts())
}
