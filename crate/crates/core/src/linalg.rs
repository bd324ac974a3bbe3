//! Small dense-matrix helpers shared across modules.
//!
//! Positive definiteness is always decided by Cholesky factorization; the
//! eigenvalue routines exist for cone diagnostics where the smallest
//! eigenvalue itself is reported.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Cholesky factorization of a symmetric matrix, or a `NotPositiveDefinite`
/// error naming the context.
pub fn cholesky(m: DMatrix<f64>, context: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(m).ok_or_else(|| Error::NotPositiveDefinite {
        context: context.to_string(),
    })
}

/// Whether a symmetric matrix is positive definite (Cholesky succeeds).
pub fn is_pd(m: &DMatrix<f64>) -> bool {
    Cholesky::new(m.clone()).is_some()
}

/// log det of an SPD matrix from its Cholesky factor.
pub fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Inverse of an SPD matrix via Cholesky.
pub fn spd_inverse(m: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    Ok(cholesky(m.clone(), context)?.inverse())
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn extreme_eigenvalues(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(m.clone());
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}

/// Frobenius norm of the difference of two equally sized matrices.
pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_det_matches_direct_determinant() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5]);
        let chol = cholesky(m.clone(), "test").unwrap();
        assert_relative_eq!(log_det(&chol), m.determinant().ln(), epsilon = 1e-12);
    }

    #[test]
    fn pd_detection() {
        assert!(is_pd(&DMatrix::identity(3, 3)));
        assert!(!is_pd(&(-DMatrix::<f64>::identity(3, 3))));
    }

    #[test]
    fn eigen_range_of_identity() {
        let (lo, hi) = extreme_eigenvalues(&DMatrix::identity(4, 4));
        assert_relative_eq!(lo, 1.0, epsilon = 1e-12);
        assert_relative_eq!(hi, 1.0, epsilon = 1e-12);
    }
}
