//! Information-theoretic measures built on the dephasing map Φ_A.
//!
//! For a single-qubit observable A with eigenprojectors `M_i`,
//! `Φ_A(ρ) = Σ_i (M_i ⊗ 1) ρ (M_i ⊗ 1)` is an unread measurement of A, and
//!
//! * irreality `𝕀_A(ρ) = S(Φ_A(ρ)) − S(ρ)`,
//! * relative entropy of coherence `C_A = S(Φ_A(ρ_A)) − S(ρ_A)` on the
//!   reduced state of the measured qubit,
//! * measurement discord `D_A = 𝕀_A − C_A`.
//!
//! All values are in bits. The plain functions clamp floating-point dust
//! below zero; [`decompose`] returns the raw values.

use crate::error::{Error, Result};
use crate::qmath::{
    kron, von_neumann_entropy, ComplexMatrix, DensityMatrix, Register, StateVector, ZERO,
};

/// Eigenbasis of the measured observable.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum TargetBasis {
    #[default]
    Computational,
    /// Columns of the unitary are the eigenvectors.
    Custom(ComplexMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureTarget {
    pub label: String,
    pub basis: TargetBasis,
}

impl MeasureTarget {
    /// Computational-basis observable on `label`.
    pub fn qubit(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            basis: TargetBasis::Computational,
        }
    }

    pub fn with_basis(label: impl Into<String>, eigenvectors: ComplexMatrix) -> Result<Self> {
        if eigenvectors.rows() != 2 || eigenvectors.cols() != 2 {
            return Err(Error::Dimension {
                expected: "2x2".into(),
                got: format!("{}x{}", eigenvectors.rows(), eigenvectors.cols()),
            });
        }
        let dev = eigenvectors.unitarity_error();
        if dev > 1e-12 {
            return Err(Error::NotUnitary {
                name: "target basis".into(),
                deviation: dev,
            });
        }
        Ok(Self {
            label: label.into(),
            basis: TargetBasis::Custom(eigenvectors),
        })
    }
}

impl From<&str> for MeasureTarget {
    fn from(label: &str) -> Self {
        Self::qubit(label)
    }
}

/// `u` acting on register position `pos`, identity elsewhere.
fn embed(u: &ComplexMatrix, pos: usize, n: usize) -> ComplexMatrix {
    (0..n).fold(ComplexMatrix::identity(1), |acc, q| {
        if q == pos {
            kron(&acc, u)
        } else {
            kron(&acc, &ComplexMatrix::identity(2))
        }
    })
}

fn drop_cross_terms(m: &ComplexMatrix, shift: usize) -> ComplexMatrix {
    let d = m.rows();
    ComplexMatrix::from_fn(d, d, |i, j| {
        if (i ^ j) >> shift & 1 == 0 {
            m.get(i, j)
        } else {
            ZERO
        }
    })
}

/// Nonselective measurement of the target observable.
pub fn dephase(rho: &DensityMatrix, target: &MeasureTarget) -> Result<DensityMatrix> {
    let reg = rho.register();
    let pos = reg.position(&target.label)?;
    let shift = reg.shift(pos);
    let out = match &target.basis {
        TargetBasis::Computational => drop_cross_terms(rho.matrix(), shift),
        TargetBasis::Custom(u) => {
            let full = embed(u, pos, reg.len());
            let in_eigenbasis = &(&full.adjoint() * rho.matrix()) * &full;
            let dephased = drop_cross_terms(&in_eigenbasis, shift);
            &(&full * &dephased) * &full.adjoint()
        }
    };
    Ok(DensityMatrix::from_trusted(reg.clone(), out))
}

/// Joint dephasing as the composition `Φ_{t_k} ∘ … ∘ Φ_{t_1}`.
pub fn dephase_all(rho: &DensityMatrix, targets: &[MeasureTarget]) -> Result<DensityMatrix> {
    targets
        .iter()
        .try_fold(rho.clone(), |acc, t| dephase(&acc, t))
}

/// Raw components of the irreality decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    pub irreality: f64,
    pub coherence: f64,
    pub discord: f64,
}

pub fn irreality_raw(rho: &DensityMatrix, target: &MeasureTarget) -> Result<f64> {
    let dephased = dephase(rho, target)?;
    Ok(von_neumann_entropy(&dephased) - von_neumann_entropy(rho))
}

pub fn coherence_raw(rho: &DensityMatrix, target: &MeasureTarget) -> Result<f64> {
    let local = rho.reduce_to(&[target.label.as_str()])?;
    irreality_raw(&local, target)
}

pub fn decompose(rho: &DensityMatrix, target: &MeasureTarget) -> Result<Decomposition> {
    let irreality = irreality_raw(rho, target)?;
    let coherence = coherence_raw(rho, target)?;
    Ok(Decomposition {
        irreality,
        coherence,
        discord: irreality - coherence,
    })
}

pub fn irreality(rho: &DensityMatrix, target: &MeasureTarget) -> Result<f64> {
    Ok(irreality_raw(rho, target)?.max(0.0))
}

pub fn coherence_rel_entropy(rho: &DensityMatrix, target: &MeasureTarget) -> Result<f64> {
    Ok(coherence_raw(rho, target)?.max(0.0))
}

pub fn discord_of_measurement(rho: &DensityMatrix, target: &MeasureTarget) -> Result<f64> {
    Ok(decompose(rho, target)?.discord.max(0.0))
}

/// Entropy of the state left after tracing out `cut`.
pub fn entanglement_entropy<S: AsRef<str>>(psi: &StateVector, cut: &[S]) -> Result<f64> {
    let reg = psi.register();
    if cut.is_empty() || cut.len() >= reg.len() {
        return Err(Error::InvalidCut(format!(
            "cut of {} qubit(s) is not a proper nonempty subset of {reg}",
            cut.len()
        )));
    }
    let labels: Vec<&str> = cut.iter().map(AsRef::as_ref).collect();
    if Register::new(&labels).is_err() {
        return Err(Error::InvalidCut(format!("repeated label in {labels:?}")));
    }
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "state is not normalized (|psi|^2 = {norm})"
        )));
    }
    let rho = DensityMatrix::from_pure(psi);
    Ok(von_neumann_entropy(&rho.partial_trace(&labels)?))
}
