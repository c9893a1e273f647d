use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::qmath::{c, ComplexMatrix, I, ONE, ZERO};

pub const UNITARITY_TOL: f64 = 1e-12;

/// A named one- or two-qubit unitary.
///
/// For two-qubit gates the first target is the high bit of the 4×4 matrix
/// index, so controlled gates take `[control, target]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    name: String,
    unitary: ComplexMatrix,
    arity: usize,
}

impl Gate {
    pub fn new(name: impl Into<String>, unitary: ComplexMatrix) -> Result<Self> {
        let name = name.into();
        let arity = match (unitary.rows(), unitary.cols()) {
            (2, 2) => 1,
            (4, 4) => 2,
            (r, cl) => {
                return Err(Error::Dimension {
                    expected: "2x2 or 4x4".into(),
                    got: format!("{r}x{cl}"),
                })
            }
        };
        let deviation = unitary.unitarity_error();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { name, deviation });
        }
        Ok(Self {
            name,
            unitary,
            arity,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `self` applied after `first`, i.e. the matrix product `self · first`.
    pub fn after(&self, first: &Gate, name: impl Into<String>) -> Result<Gate> {
        Gate::new(name, self.unitary.matmul(&first.unitary)?)
    }

    /// `|0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ U` for a single-qubit `U`.
    pub fn controlled(&self, name: impl Into<String>) -> Result<Gate> {
        if self.arity != 1 {
            return Err(Error::Arity {
                name: self.name.clone(),
                arity: self.arity,
                targets: 1,
            });
        }
        let u = &self.unitary;
        let m = ComplexMatrix::from_fn(4, 4, |i, j| match (i >> 1, j >> 1) {
            (0, 0) => {
                if i == j {
                    ONE
                } else {
                    ZERO
                }
            }
            (1, 1) => u.get(i & 1, j & 1),
            _ => ZERO,
        });
        Gate::new(name, m)
    }
}

/// Gate dictionary used to translate the optical elements into qubit gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StandardGate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Ry(f64),
    Cnot,
    Cz,
    Cy,
    /// Combined mirror action, `Y·Z`.
    Mirror,
    /// Balanced beam splitter, `S·H·S`.
    BeamSplitter,
    /// Quarter-wave plate, `S·H`.
    QuarterWavePlate,
}

fn one_qubit(rows: [[num_complex::Complex64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| rows[i][j])
}

impl StandardGate {
    pub fn gate(self) -> Gate {
        let r = c(FRAC_1_SQRT_2, 0.0);
        let m1 = c(-1.0, 0.0);
        let (name, m): (String, ComplexMatrix) = match self {
            Self::X => ("X".into(), one_qubit([[ZERO, ONE], [ONE, ZERO]])),
            Self::Y => ("Y".into(), one_qubit([[ZERO, -I], [I, ZERO]])),
            Self::Z => ("Z".into(), one_qubit([[ONE, ZERO], [ZERO, m1]])),
            Self::H => ("H".into(), one_qubit([[r, r], [r, -r]])),
            Self::S => ("S".into(), one_qubit([[ONE, ZERO], [ZERO, I]])),
            Self::Sdg => ("SDG".into(), one_qubit([[ONE, ZERO], [ZERO, -I]])),
            Self::Ry(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                (
                    format!("RY({theta})"),
                    one_qubit([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]),
                )
            }
            Self::Cnot => return Self::X.gate().controlled("CNOT").expect("unitary"),
            Self::Cz => return Self::Z.gate().controlled("CZ").expect("unitary"),
            Self::Cy => return Self::Y.gate().controlled("CY").expect("unitary"),
            Self::Mirror => return product("MIRROR", &[Self::Z, Self::Y]),
            Self::BeamSplitter => return product("BS", &[Self::S, Self::H, Self::S]),
            Self::QuarterWavePlate => return product("QWP", &[Self::H, Self::S]),
        };
        Gate::new(name, m).expect("library gates are unitary")
    }
}

/// Applies `seq` left to right in time, so `[Z, Y]` is the operator `Y·Z`.
fn product(name: &str, seq: &[StandardGate]) -> Gate {
    let mut acc = ComplexMatrix::identity(2);
    for g in seq {
        acc = g.gate().unitary().matmul(&acc).expect("2x2");
    }
    Gate::new(name, acc).expect("products of unitaries are unitary")
}

/// Looks up a gate by name; `RY` takes one angle parameter in radians.
pub fn standard_gate(name: &str, params: &[f64]) -> Result<Gate> {
    let upper = name.to_ascii_uppercase();
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "gate {upper} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let g = match upper.as_str() {
        "RY" => {
            want(1)?;
            if !params[0].is_finite() {
                return Err(Error::NonFinite);
            }
            StandardGate::Ry(params[0])
        }
        other => {
            want(0)?;
            match other {
                "X" => StandardGate::X,
                "Y" => StandardGate::Y,
                "Z" => StandardGate::Z,
                "H" => StandardGate::H,
                "S" => StandardGate::S,
                "SDG" => StandardGate::Sdg,
                "CNOT" | "CX" => StandardGate::Cnot,
                "CZ" => StandardGate::Cz,
                "CY" => StandardGate::Cy,
                "MIRROR" => StandardGate::Mirror,
                "BS" => StandardGate::BeamSplitter,
                "QWP" => StandardGate::QuarterWavePlate,
                _ => return Err(Error::UnknownGate(name.to_string())),
            }
        }
    };
    Ok(g.gate())
}
