use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{CountsTable, MeasurementSetting, PauliBasis, Weight};
use crate::error::{Error, Result};
use crate::qmath::{c, ComplexMatrix, DensityMatrix, I, ONE, ZERO};

pub const MAX_TOMOGRAPHY_QUBITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn entry(self, row: usize, col: usize) -> Complex64 {
        match (self, row, col) {
            (Pauli::I, r, cl) => {
                if r == cl {
                    ONE
                } else {
                    ZERO
                }
            }
            (Pauli::X, r, cl) => {
                if r != cl {
                    ONE
                } else {
                    ZERO
                }
            }
            (Pauli::Y, 0, 1) => -I,
            (Pauli::Y, 1, 0) => I,
            (Pauli::Z, 0, 0) => ONE,
            (Pauli::Z, 1, 1) => c(-1.0, 0.0),
            _ => ZERO,
        }
    }

    fn basis(self) -> Option<PauliBasis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(PauliBasis::X),
            Pauli::Y => Some(PauliBasis::Y),
            Pauli::Z => Some(PauliBasis::Z),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, first factor on the first qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self(factors)
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `4^n` strings, `I < X < Y < Z` lexicographically.
    pub fn all(n: usize) -> Vec<PauliString> {
        (0..4usize.pow(n as u32))
            .map(|k| {
                PauliString(
                    (0..n)
                        .map(|q| Pauli::ALL[(k / 4usize.pow((n - 1 - q) as u32)) % 4])
                        .collect(),
                )
            })
            .collect()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.0.len();
        ComplexMatrix::from_fn(1 << n, 1 << n, |i, j| {
            self.0.iter().enumerate().fold(ONE, |acc, (q, p)| {
                let s = n - 1 - q;
                acc * p.entry((i >> s) & 1, (j >> s) & 1)
            })
        })
    }

    /// Whether measuring `setting` determines this observable.
    pub fn covered_by(&self, setting: &MeasurementSetting) -> bool {
        self.0.len() == setting.len()
            && self
                .0
                .iter()
                .zip(setting.bases())
                .all(|(p, b)| p.basis().is_none_or(|pb| pb == *b))
    }

    /// `(−1)^(parity of outcome bits on the non-identity factors)`.
    fn sign(&self, outcome: usize) -> f64 {
        let n = self.0.len();
        let parity = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .fold(0, |acc, (q, _)| acc ^ ((outcome >> (n - 1 - q)) & 1));
        if parity == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidArgument(format!("bad Pauli `{ch}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

/// All `3^n` local measurement settings, `X < Y < Z` lexicographically.
pub fn pauli_settings(n: usize) -> Result<Vec<MeasurementSetting>> {
    if !(1..=MAX_TOMOGRAPHY_QUBITS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "tomography needs 1 to {MAX_TOMOGRAPHY_QUBITS} qubits, got {n}"
        )));
    }
    Ok((0..3usize.pow(n as u32))
        .map(|k| {
            MeasurementSetting::new(
                (0..n)
                    .map(|q| PauliBasis::ALL[(k / 3usize.pow((n - 1 - q) as u32)) % 3])
                    .collect(),
            )
        })
        .collect())
}

/// Estimates every Pauli expectation from counts. Strings with identity
/// factors use the first table in `counts` whose setting covers them.
pub fn expectations_from_counts<T: Weight>(
    counts: &[CountsTable<T>],
) -> Result<BTreeMap<PauliString, f64>> {
    let n = counts
        .first()
        .map(|t| t.setting.len())
        .ok_or_else(|| Error::MissingPauli("I".into()))?;
    let dense = counts
        .iter()
        .map(|t| {
            let total = t.total();
            if total.is_nan() || total <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "setting `{}` has no shots",
                    t.setting
                )));
            }
            Ok(t.to_dense()?
                .into_iter()
                .map(|w| w / total)
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    PauliString::all(n)
        .into_iter()
        .map(|p| {
            let k = counts
                .iter()
                .position(|t| p.covered_by(&t.setting))
                .ok_or_else(|| Error::MissingPauli(p.to_string()))?;
            let value = dense[k]
                .iter()
                .enumerate()
                .map(|(i, f)| f * p.sign(i))
                .sum();
            Ok((p, value))
        })
        .collect()
}

/// `tr(ρ P)` for every Pauli string on the register of `rho`.
pub fn exact_expectations(rho: &DensityMatrix) -> BTreeMap<PauliString, f64> {
    PauliString::all(rho.register().len())
        .into_iter()
        .map(|p| {
            let m = p.matrix();
            let dim = rho.dim();
            let mut tr = ZERO;
            for i in 0..dim {
                for j in 0..dim {
                    tr += rho.get(i, j) * m.get(j, i);
                }
            }
            (p, tr.re)
        })
        .collect()
}

/// `ρ̂ = 2^{-n} Σ_P ⟨P⟩ P`.
pub fn linear_inversion(expectations: &BTreeMap<PauliString, f64>) -> Result<ComplexMatrix> {
    let n = expectations
        .keys()
        .next()
        .map(PauliString::len)
        .ok_or_else(|| Error::MissingPauli("I".into()))?;
    let dim = 1usize << n;
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for p in PauliString::all(n) {
        let v = *expectations
            .get(&p)
            .ok_or_else(|| Error::MissingPauli(p.to_string()))?;
        if v != 0.0 {
            acc = &acc + &p.matrix().scale(c(v, 0.0));
        }
    }
    Ok(acc.scale(c(1.0 / dim as f64, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::StateVector;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn setting_enumeration() {
        let one: Vec<String> = pauli_settings(1)
            .unwrap()
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(one, ["X", "Y", "Z"]);
        let two = pauli_settings(2).unwrap();
        assert_eq!(two.len(), 9);
        assert_eq!(two[0].to_string(), "XX");
        assert_eq!(two[1].to_string(), "XY");
        assert_eq!(two[8].to_string(), "ZZ");
        assert_eq!(pauli_settings(4).unwrap().len(), 81);
        assert!(pauli_settings(0).is_err());
        assert!(pauli_settings(7).is_err());
    }

    #[test]
    fn string_enumeration_and_parse() {
        let all = PauliString::all(2);
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].to_string(), "II");
        assert_eq!(all[6].to_string(), "XY");
        assert_eq!("XY".parse::<PauliString>().unwrap(), all[6]);
        assert!("XA".parse::<PauliString>().is_err());
    }

    #[test]
    fn string_matrix_is_kron() {
        let zx = "ZX".parse::<PauliString>().unwrap().matrix();
        // Z ⊗ X: [[X, 0], [0, -X]]
        assert_eq!(zx.get(0, 1), ONE);
        assert_eq!(zx.get(2, 3), c(-1.0, 0.0));
        assert_eq!(zx.get(0, 2), ZERO);
        let y = "Y".parse::<PauliString>().unwrap().matrix();
        assert_eq!(y.get(0, 1), -I);
    }

    #[test]
    fn first_covering_setting() {
        let zi: PauliString = "ZI".parse().unwrap();
        let settings = pauli_settings(2).unwrap();
        let k = settings.iter().position(|s| zi.covered_by(s)).unwrap();
        assert_eq!(settings[k].to_string(), "ZX");
    }

    #[test]
    fn inversion_of_zero_state() {
        let mut e = BTreeMap::new();
        for p in PauliString::all(1) {
            e.insert(p, 0.0);
        }
        e.insert("I".parse().unwrap(), 1.0);
        e.insert("Z".parse().unwrap(), 1.0);
        let rho = linear_inversion(&e).unwrap();
        assert!(rho.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn inversion_of_circular_state() {
        let w = StateVector::qubit("b", c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)).unwrap();
        let rho = DensityMatrix::from_pure(&w);
        let back = linear_inversion(&exact_expectations(&rho)).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn inversion_of_atom_state() {
        let (s, co) = (PI / 6.0).sin_cos();
        let xi = (StateVector::basis(&["e1", "e2"], "01").unwrap() * s)
            + (StateVector::basis(&["e1", "e2"], "10").unwrap() * co);
        let back = linear_inversion(&exact_expectations(&DensityMatrix::from_pure(&xi))).unwrap();
        let expected = 3f64.sqrt() / 4.0;
        assert!((back.get(1, 2).re - expected).abs() < 1e-12);
        assert!((back.get(2, 1).re - expected).abs() < 1e-12);
    }

    #[test]
    fn missing_term_reported() {
        let mut e = BTreeMap::new();
        e.insert("I".parse::<PauliString>().unwrap(), 1.0);
        assert!(matches!(linear_inversion(&e), Err(Error::MissingPauli(p)) if p == "X"));
        assert!(linear_inversion(&BTreeMap::new()).is_err());
    }

    #[test]
    fn counts_give_expected_signs() {
        // all shots read 01 in ZZ: <ZI> = 1, <IZ> = -1, <ZZ> = -1
        let settings = pauli_settings(2).unwrap();
        let tables: Vec<CountsTable> = settings
            .into_iter()
            .map(|s| CountsTable {
                setting: s,
                outcomes: [("01".to_string(), 10u64)].into(),
            })
            .collect();
        let e = expectations_from_counts(&tables).unwrap();
        assert_eq!(e[&"ZI".parse().unwrap()], 1.0);
        assert_eq!(e[&"IZ".parse().unwrap()], -1.0);
        assert_eq!(e[&"ZZ".parse().unwrap()], -1.0);
        assert_eq!(e[&"II".parse().unwrap()], 1.0);
    }
}
