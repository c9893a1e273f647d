use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::state::{Register, StateVector};
use crate::error::{Error, Result};

/// Tolerance for the Hermitian, unit-trace and PSD checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite operator on a labelled register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    register: Register,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(register: Register, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != register.dim() || !matrix.is_square() {
            return Err(Error::Dimension {
                expected: format!("{0}x{0}", register.dim()),
                got: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let herm = matrix.hermiticity_error();
        if herm > DENSITY_TOL {
            return Err(Error::Validation(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::Validation(format!("trace is {tr}")));
        }
        let min = matrix
            .hermitian_eigenvalues()?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::Validation(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { register, matrix })
    }

    /// For operations that provably preserve the invariants.
    pub(crate) fn from_trusted(register: Register, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), register.dim());
        Self { register, matrix }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let n = a.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj());
        Self::from_trusted(psi.register().clone(), m)
    }

    pub fn maximally_mixed(register: Register) -> Self {
        let d = register.dim();
        let m = ComplexMatrix::from_real_diagonal(&vec![1.0 / d as f64; d]);
        Self::from_trusted(register, m)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.register() != &self.register {
            return Err(Error::RegisterMismatch(
                psi.register().labels().to_vec(),
                self.register.labels().to_vec(),
            ));
        }
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for i in 0..a.len() {
            for j in 0..a.len() {
                acc += a[i].conj() * self.matrix.get(i, j) * a[j];
            }
        }
        Ok(acc.re)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Traces out every qubit in `discard`, keeping the remaining labels in order.
    pub fn partial_trace<S: AsRef<str>>(&self, discard: &[S]) -> Result<DensityMatrix> {
        let n = self.register.len();
        let mut gone = vec![false; n];
        for l in discard {
            gone[self.register.position(l.as_ref())?] = true;
        }
        let kept_pos: Vec<usize> = (0..n).filter(|&p| !gone[p]).collect();
        let traced_pos: Vec<usize> = (0..n).filter(|&p| gone[p]).collect();
        let kept_labels: Vec<&str> = kept_pos
            .iter()
            .map(|&p| self.register.labels()[p].as_str())
            .collect();
        let register = Register::new(&kept_labels)?;

        let spread = |bits: usize, positions: &[usize]| -> usize {
            let k = positions.len();
            positions
                .iter()
                .enumerate()
                .filter(|(q, _)| (bits >> (k - 1 - q)) & 1 == 1)
                .fold(0usize, |acc, (_, &p)| acc | 1 << self.register.shift(p))
        };

        let dk = 1usize << kept_pos.len();
        let dt = 1usize << traced_pos.len();
        let traced_offsets: Vec<usize> = (0..dt).map(|t| spread(t, &traced_pos)).collect();
        let kept_offsets: Vec<usize> = (0..dk).map(|k| spread(k, &kept_pos)).collect();
        let m = ComplexMatrix::from_fn(dk, dk, |i, j| {
            traced_offsets
                .iter()
                .map(|&t| self.matrix.get(kept_offsets[i] | t, kept_offsets[j] | t))
                .sum()
        });
        Ok(Self::from_trusted(register, m))
    }

    /// Reduced state on `keep`, in the order the labels appear in the register.
    pub fn reduce_to<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        for l in keep {
            self.register.position(l.as_ref())?;
        }
        let discard: Vec<&str> = self
            .register
            .labels()
            .iter()
            .map(String::as_str)
            .filter(|l| !keep.iter().any(|k| k.as_ref() == *l))
            .collect();
        self.partial_trace(&discard)
    }
}

pub fn partial_trace<S: AsRef<str>>(rho: &DensityMatrix, discard: &[S]) -> Result<DensityMatrix> {
    rho.partial_trace(discard)
}
