//! Dimensionality measures T2, T3, T4.

use nalgebra::DMatrix;

use crate::dataset::{Dataset, NumericMatrix};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Share of total variance the retained components must explain.
pub const VARIANCE_SHARE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaSummary {
    /// Eigenvalues of the correlation matrix of the non-constant columns,
    /// descending, negatives from rounding clamped to 0.
    pub eigenvalues: Vec<f64>,
    /// Components needed to reach [`VARIANCE_SHARE`] of the variance.
    pub m_prime: usize,
}

/// Principal components of the standardized columns of `x`. Constant
/// columns carry no variance and are left out.
pub fn pca_encoded(x: &NumericMatrix) -> Result<PcaSummary> {
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::InvalidDataset(format!(
            "PCA needs at least 2 rows, got {n}"
        )));
    }
    let mut standardized: Vec<Vec<f64>> = Vec::new();
    for j in 0..x.n_cols() {
        let col: Vec<f64> = x.column(j).collect();
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        if var > 0.0 {
            let sd = var.sqrt();
            standardized.push(col.iter().map(|v| (v - mean) / sd).collect());
        }
    }
    if standardized.is_empty() {
        return Err(Error::ZeroVariance);
    }
    let k = standardized.len();
    let corr = DMatrix::from_fn(k, k, |a, b| {
        standardized[a]
            .iter()
            .zip(&standardized[b])
            .map(|(u, v)| u * v)
            .sum::<f64>()
            / (n - 1) as f64
    });
    let (values, _) = symmetric_eigen(corr);
    let eigenvalues: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let mut running = 0.0;
    let mut m_prime = eigenvalues.len();
    for (i, v) in eigenvalues.iter().enumerate() {
        running += v;
        if running >= VARIANCE_SHARE * total * (1.0 - 1e-12) {
            m_prime = i + 1;
            break;
        }
    }
    Ok(PcaSummary {
        eigenvalues,
        m_prime,
    })
}

pub fn pca_summary(d: &Dataset) -> Result<PcaSummary> {
    pca_encoded(&d.to_numeric())
}

/// T2: features per example.
pub fn t2(d: &Dataset) -> f64 {
    d.m() as f64 / d.n() as f64
}

/// T3: retained principal components per example.
pub fn t3_from(d: &Dataset, pca: &PcaSummary) -> f64 {
    pca.m_prime as f64 / d.n() as f64
}

/// T4: retained principal components per feature.
pub fn t4_from(d: &Dataset, pca: &PcaSummary) -> f64 {
    pca.m_prime as f64 / d.m() as f64
}

pub fn t3(d: &Dataset) -> Result<f64> {
    Ok(t3_from(d, &pca_summary(d)?))
}

pub fn t4(d: &Dataset) -> Result<f64> {
    Ok(t4_from(d, &pca_summary(d)?))
}
