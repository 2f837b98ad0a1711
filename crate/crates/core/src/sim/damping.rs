use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues of `sym(K)` below this are rejected; above it they are clamped to 0.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-9;

/// Function `f` applied to the eigenvalues of the symmetric matrix `a`.
fn spectral_map(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Damping for the stiffness/inertia pair `(K, M)`:
///
/// ```text
/// B = 2ζ·M^½·(M^-½·K·M^-½)^½·M^½
/// ```
///
/// which gives every mode of the linearized system the ratio `ζ`. Only the
/// symmetric part of `K` is used.
pub fn design_damping(k: &DMatrix<f64>, m: &DMatrix<f64>, zeta: f64) -> Result<DMatrix<f64>> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.nrows(),
            cols: k.ncols(),
        });
    }
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if k.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: k.nrows(),
        });
    }
    if !(zeta.is_finite() && zeta >= 0.0) {
        return Err(Error::Config(format!(
            "damping ratio {zeta} must be non-negative"
        )));
    }

    let m = symmetrize(m);
    let m_eig = SymmetricEigen::new(m.clone());
    let m_min = m_eig.eigenvalues.min();
    if !(m_min > 0.0) {
        return Err(Error::NonPositiveDefinite(format!(
            "smallest mass-matrix eigenvalue {m_min:e}"
        )));
    }
    let ks = symmetrize(k);
    let k_min = SymmetricEigen::new(ks.clone()).eigenvalues.min();
    if k_min < -NEGATIVE_EIGENVALUE_TOL {
        return Err(Error::NegativeEigenvalue(k_min));
    }

    let v = &m_eig.eigenvectors;
    let m_half = v * DMatrix::from_diagonal(&m_eig.eigenvalues.map(f64::sqrt)) * v.transpose();
    let m_inv_half =
        v * DMatrix::from_diagonal(&m_eig.eigenvalues.map(|x| 1.0 / x.sqrt())) * v.transpose();
    let inner = symmetrize(&(&m_inv_half * &ks * &m_inv_half));
    let root = spectral_map(&inner, |x| x.max(0.0).sqrt());
    Ok(symmetrize(&(&m_half * root * &m_half)) * (2.0 * zeta))
}
