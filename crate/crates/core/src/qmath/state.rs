use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::matrix::{ONE, ZERO};
use crate::error::{Error, Result};

/// Ordered qubit labels.
///
/// The first label is the most significant bit of an amplitude index, so
/// `|011⟩` on `[A, B, C]` lives at index `0b011`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Register(Vec<String>);

impl Register {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut out: Vec<String> = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            if out.iter().any(|x| x == l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            out.push(l.to_string());
        }
        Ok(Self(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.0.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.0
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.iter().any(|l| l == label)
    }

    /// Shift of the bit belonging to register position `pos` in an amplitude index.
    #[inline]
    pub fn shift(&self, pos: usize) -> usize {
        self.0.len() - 1 - pos
    }

    pub fn bit_shift(&self, label: &str) -> Result<usize> {
        Ok(self.shift(self.position(label)?))
    }

    fn concat(&self, other: &Register) -> Result<Register> {
        let all: Vec<&str> = self
            .0
            .iter()
            .chain(other.0.iter())
            .map(String::as_str)
            .collect();
        Register::new(&all)
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(","))
    }
}

/// Pure state over a labelled register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    register: Register,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// All qubits in `|0⟩`.
    pub fn zero(register: Register) -> Self {
        let mut amplitudes = vec![ZERO; register.dim()];
        amplitudes[0] = ONE;
        Self {
            register,
            amplitudes,
        }
    }

    pub fn from_amplitudes(register: Register, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(Error::Dimension {
                expected: format!("{} amplitudes", register.dim()),
                got: format!("{}", amplitudes.len()),
            });
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Computational basis ket, e.g. `basis(&["A", "b"], "01")`.
    pub fn basis<S: AsRef<str>>(labels: &[S], bits: &str) -> Result<Self> {
        let register = Register::new(labels)?;
        if bits.len() != register.len() {
            return Err(Error::Dimension {
                expected: format!("{} bits", register.len()),
                got: format!("`{bits}`"),
            });
        }
        let mut index = 0usize;
        for ch in bits.chars() {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "bad bit `{ch}` in `{bits}`"
                    )))
                }
            }
        }
        let mut amplitudes = vec![ZERO; register.dim()];
        amplitudes[index] = ONE;
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Single-qubit state `α|0⟩ + β|1⟩` on `label`.
    pub fn qubit(label: &str, alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::from_amplitudes(Register::new(&[label])?, vec![alpha, beta])
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(self.clone() * Complex64::new(1.0 / n, 0.0))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_register(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Tensor product; the result's register is `self`'s labels followed by `other`'s.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let register = self.register.concat(&other.register)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Same state with qubits permuted into the order given by `labels`.
    pub fn reorder<S: AsRef<str>>(&self, labels: &[S]) -> Result<StateVector> {
        let target = Register::new(labels)?;
        if target.len() != self.register.len() {
            return Err(Error::RegisterMismatch(
                self.register.labels().to_vec(),
                target.labels().to_vec(),
            ));
        }
        // shift in the source index for each target position
        let shifts = target
            .labels()
            .iter()
            .map(|l| self.register.bit_shift(l))
            .collect::<Result<Vec<_>>>()?;
        let n = target.len();
        let mut amplitudes = vec![ZERO; target.dim()];
        for (new_idx, amp) in amplitudes.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (pos, &s) in shifts.iter().enumerate() {
                if (new_idx >> (n - 1 - pos)) & 1 == 1 {
                    old_idx |= 1 << s;
                }
            }
            *amp = self.amplitudes[old_idx];
        }
        Ok(Self {
            register: target,
            amplitudes,
        })
    }

    pub fn check_same_register(&self, other: &StateVector) -> Result<()> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(
                self.register.labels().to_vec(),
                other.register.labels().to_vec(),
            ));
        }
        Ok(())
    }

    /// Probability that `label` reads `outcome` in the computational basis.
    pub fn outcome_probability(&self, label: &str, outcome: u8) -> Result<f64> {
        let shift = self.register.bit_shift(label)?;
        let want = usize::from(outcome & 1);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift) & 1 == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

/// Fidelity-based comparison: true iff `|⟨psi|phi⟩|² ≥ 1 − tol`.
pub fn equal_up_to_global_phase(psi: &StateVector, phi: &StateVector, tol: f64) -> Result<bool> {
    Ok(psi.fidelity(phi)? >= 1.0 - tol)
}

impl Add for StateVector {
    type Output = StateVector;

    /// Panics if the registers differ.
    fn add(mut self, rhs: StateVector) -> StateVector {
        self.check_same_register(&rhs)
            .expect("adding states on different registers");
        for (a, b) in self.amplitudes.iter_mut().zip(rhs.amplitudes) {
            *a += b;
        }
        self
    }
}

impl Sub for StateVector {
    type Output = StateVector;

    fn sub(self, rhs: StateVector) -> StateVector {
        self + rhs * Complex64::new(-1.0, 0.0)
    }
}

impl Mul<Complex64> for StateVector {
    type Output = StateVector;

    fn mul(mut self, rhs: Complex64) -> StateVector {
        for a in &mut self.amplitudes {
            *a *= rhs;
        }
        self
    }
}

impl Mul<f64> for StateVector {
    type Output = StateVector;

    fn mul(self, rhs: f64) -> StateVector {
        self * Complex64::new(rhs, 0.0)
    }
}
