use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Off-diagonal convergence tolerance for symmetric diagonalization.
const EIGEN_TOLERANCE: f64 = 1e-12;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenvalues and eigenvectors of a symmetric matrix, eigenvalues sorted
/// descending (eigenvector columns follow the same order).
pub(crate) fn symmetric_eigen(matrix: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    let eig = SymmetricEigen::try_new(matrix.clone(), EIGEN_TOLERANCE, EIGEN_MAX_ITER)
        // implicit QR gave up; the default routine iterates until convergence
        .unwrap_or_else(|| SymmetricEigen::new(matrix));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix
/// applied to `rhs`. Eigenvalues below `relative_cutoff * max_eigenvalue` are
/// treated as zero.
pub(crate) fn pinv_apply(
    matrix: DMatrix<f64>,
    rhs: &DVector<f64>,
    relative_cutoff: f64,
) -> DVector<f64> {
    let (values, vectors) = symmetric_eigen(matrix);
    let largest = values.first().copied().unwrap_or(0.0);
    let mut out = DVector::zeros(rhs.len());
    if largest <= 0.0 {
        return out;
    }
    let cutoff = relative_cutoff * largest;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > cutoff {
            let v = vectors.column(k);
            let coef = v.dot(rhs) / lambda;
            out.axpy(coef, &v, 1.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_descending() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (values, _) = symmetric_eigen(m);
        assert!((values[0] - 2.0).abs() < 1e-12);
        assert!(values[1].abs() < 1e-12);
    }

    #[test]
    fn pinv_of_singular_matrix() {
        // diag(4, 0): pinv = diag(1/4, 0)
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.0]);
        let out = pinv_apply(m, &DVector::from_vec(vec![2.0, 3.0]), 1e-10);
        assert!((out[0] - 0.5).abs() < 1e-12);
        assert!(out[1].abs() < 1e-12);
    }
}
