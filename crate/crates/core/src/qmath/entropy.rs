use super::density::DensityMatrix;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Eigenvalues below this are treated as exact zeros.
pub const EIGEN_CLIP: f64 = 1e-12;

/// `−Σ λ log₂ λ` over a spectrum, with `0·log 0 = 0`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CLIP)
        .map(|&l| -l * l.log2())
        .sum();
    // -0.0 and rounding dust on pure states
    s.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eig = rho
        .matrix()
        .hermitian_eigenvalues()
        .expect("density matrices are Hermitian");
    spectrum_entropy(&eig)
}

/// Entropy of an arbitrary matrix, rejecting non-Hermitian input.
pub fn hermitian_entropy(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Validation("matrix is not square".into()));
    }
    let err = m.hermiticity_error();
    if err > 1e-10 {
        return Err(Error::Validation(format!(
            "not Hermitian (deviation {err:e})"
        )));
    }
    Ok(spectrum_entropy(&m.hermitian_eigenvalues()?))
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || p.is_nan() {
        return Err(Error::Domain {
            value: p,
            domain: "[0, 1]",
        });
    }
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}
