use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{apply_gate_mut, StandardGate};
use crate::error::{Error, Result};
use crate::qmath::StateVector;
use crate::rng::seeded_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    pub fn symbol(self) -> char {
        match self {
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        match ch {
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }
}

/// One basis per measured qubit, in the order the qubits are listed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MeasurementSetting(Vec<PauliBasis>);

impl MeasurementSetting {
    pub fn new(bases: Vec<PauliBasis>) -> Self {
        Self(bases)
    }

    pub fn bases(&self) -> &[PauliBasis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{}", b.symbol()))
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| {
                PauliBasis::from_symbol(ch).ok_or_else(|| {
                    Error::InvalidArgument(format!("bad basis `{ch}` in setting `{s}`"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl TryFrom<String> for MeasurementSetting {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MeasurementSetting> for String {
    fn from(m: MeasurementSetting) -> String {
        m.to_string()
    }
}

/// Outcome histogram for one setting. Keys are bitstrings over the measured
/// qubits, `0` meaning the +1 eigenvalue of that qubit's basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountsTable<T = u64> {
    pub setting: MeasurementSetting,
    pub outcomes: BTreeMap<String, T>,
}

/// Count types a histogram can hold: raw shot counts or mitigated weights.
pub trait Weight: Copy {
    fn to_f64(self) -> f64;
}

impl Weight for u64 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Weight for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

impl<T: Weight> CountsTable<T> {
    /// Dense weight vector indexed by outcome integer (first qubit = high bit).
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let n = self.setting.len();
        let mut v = vec![0.0; 1 << n];
        for (bits, &w) in &self.outcomes {
            v[bits_to_index(bits, n)?] = w.to_f64();
        }
        Ok(v)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.values().map(|&w| w.to_f64()).sum()
    }
}

pub(crate) fn index_to_bits(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| {
            if (index >> (n - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

pub(crate) fn bits_to_index(bits: &str, n: usize) -> Result<usize> {
    if bits.len() != n {
        return Err(Error::InvalidArgument(format!(
            "outcome `{bits}` is not {n} bits"
        )));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(Error::InvalidArgument(format!("bad outcome `{bits}`"))),
    })
}

/// Rotates each listed qubit so its measurement basis maps onto Z:
/// `H` for X, `S†` then `H` for Y.
pub fn rotate_to_basis<S: AsRef<str>>(
    state: &StateVector,
    qubits: &[S],
    setting: &MeasurementSetting,
) -> Result<StateVector> {
    if qubits.len() != setting.len() {
        return Err(Error::InvalidArgument(format!(
            "{} qubits but setting `{setting}` has {} bases",
            qubits.len(),
            setting.len()
        )));
    }
    let mut out = state.clone();
    for (q, b) in qubits.iter().zip(setting.bases()) {
        match b {
            PauliBasis::Z => {}
            PauliBasis::X => apply_gate_mut(&mut out, &StandardGate::H.gate(), &[q])?,
            PauliBasis::Y => {
                apply_gate_mut(&mut out, &StandardGate::Sdg.gate(), &[q])?;
                apply_gate_mut(&mut out, &StandardGate::H.gate(), &[q])?;
            }
        }
    }
    Ok(out)
}

/// Born-rule distribution of the listed qubits in `setting`, marginalized
/// over the rest of the register.
pub fn outcome_distribution<S: AsRef<str>>(
    state: &StateVector,
    qubits: &[S],
    setting: &MeasurementSetting,
) -> Result<Vec<f64>> {
    let rotated = rotate_to_basis(state, qubits, setting)?;
    let shifts = qubits
        .iter()
        .map(|q| state.register().bit_shift(q.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let k = shifts.len();
    let mut dist = vec![0.0; 1 << k];
    for (i, a) in rotated.amplitudes().iter().enumerate() {
        let local = shifts
            .iter()
            .enumerate()
            .fold(0usize, |acc, (q, &s)| acc | ((i >> s) & 1) << (k - 1 - q));
        dist[local] += a.norm_sqr();
    }
    Ok(dist)
}

/// Inverse-CDF sampler over a finite distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weights must be nonnegative with positive sum".into(),
            ));
        }
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(Self { cdf })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        // last index absorbs rounding in the final cdf entry
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

/// Samples `shots` measurements of `qubits` in `setting`.
pub fn sample_counts<S: AsRef<str>>(
    state: &StateVector,
    qubits: &[S],
    setting: &MeasurementSetting,
    shots: u64,
    seed: u64,
) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let dist = outcome_distribution(state, qubits, setting)?;
    let sampler = Sampler::new(&dist)?;
    let mut rng = seeded_rng(seed);
    let mut hist = vec![0u64; dist.len()];
    for _ in 0..shots {
        hist[sampler.draw(&mut rng)] += 1;
    }
    Ok(histogram_table(setting.clone(), &hist))
}

pub(crate) fn histogram_table(setting: MeasurementSetting, hist: &[u64]) -> CountsTable {
    let n = setting.len();
    let outcomes = hist
        .iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(i, &h)| (index_to_bits(i, n), h))
        .collect();
    CountsTable { setting, outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::c;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn setting(s: &str) -> MeasurementSetting {
        s.parse().unwrap()
    }

    #[test]
    fn zero_in_z_basis_is_deterministic() {
        let zero = StateVector::basis(&["q"], "0").unwrap();
        let t = sample_counts(&zero, &["q"], &setting("Z"), 500, 3).unwrap();
        assert_eq!(t.outcomes.len(), 1);
        assert_eq!(t.outcomes["0"], 500);
    }

    #[test]
    fn plus_in_x_basis_always_reads_plus() {
        let plus = StateVector::qubit("q", c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let t = sample_counts(&plus, &["q"], &setting("X"), 1000, 4).unwrap();
        assert_eq!(t.outcomes.get("0"), Some(&1000));
    }

    #[test]
    fn circular_state_in_y_basis_reads_plus() {
        let w = StateVector::qubit("q", c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)).unwrap();
        let d = outcome_distribution(&w, &["q"], &setting("Y")).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn omega_plus_z_frequency_within_three_sigma() {
        let w = StateVector::qubit("q", c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)).unwrap();
        let shots = 10_000u64;
        let t = sample_counts(&w, &["q"], &setting("Z"), shots, 11).unwrap();
        let f0 = t.outcomes["0"] as f64 / shots as f64;
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((f0 - 0.5).abs() < 3.0 * sigma, "f0 = {f0}");
        assert_eq!(t.total() as u64, shots);
    }

    #[test]
    fn same_seed_same_counts() {
        let w = StateVector::qubit("q", c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let a = sample_counts(&w, &["q"], &setting("X"), 300, 5).unwrap();
        let b = sample_counts(&w, &["q"], &setting("X"), 300, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn marginal_ignores_unmeasured_qubits() {
        let s = StateVector::basis(&["x", "y", "z"], "101").unwrap();
        let d = outcome_distribution(&s, &["z", "x"], &setting("ZZ")).unwrap();
        assert_eq!(d, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_shots_rejected() {
        let zero = StateVector::basis(&["q"], "0").unwrap();
        assert!(sample_counts(&zero, &["q"], &setting("Z"), 0, 1).is_err());
    }

    #[test]
    fn setting_roundtrips_through_json() {
        let t = CountsTable {
            setting: setting("XZ"),
            outcomes: [("01".to_string(), 3u64)].into(),
        };
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"setting":"XZ","outcomes":{"01":3}}"#);
        assert_eq!(serde_json::from_str::<CountsTable>(&json).unwrap(), t);
        assert!("XQ".parse::<MeasurementSetting>().is_err());
    }
}
