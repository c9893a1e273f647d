use crate::circuit::{index_to_bits, CountsTable, Weight};
use crate::error::{Error, Result};

/// Column-stochastic readout matrix `[[p(0|0), p(0|1)], [p(1|0), p(1|1)]]`.
pub type Confusion = [[f64; 2]; 2];

const STOCHASTIC_TOL: f64 = 1e-12;
const SINGULAR_TOL: f64 = 1e-12;

/// Independent classical readout errors, one confusion matrix per measured qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutNoiseModel {
    confusion: Vec<Confusion>,
}

impl ReadoutNoiseModel {
    pub fn new(confusion: Vec<Confusion>) -> Result<Self> {
        if confusion.is_empty() {
            return Err(Error::InvalidNoise("no qubits".into()));
        }
        for (q, m) in confusion.iter().enumerate() {
            if m.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::InvalidNoise(format!(
                    "qubit {q}: entries must lie in [0, 1]"
                )));
            }
            for (col, sum) in [m[0][0] + m[1][0], m[0][1] + m[1][1]]
                .into_iter()
                .enumerate()
            {
                if (sum - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(Error::InvalidNoise(format!(
                        "qubit {q}: column {col} sums to {sum}"
                    )));
                }
            }
        }
        Ok(Self { confusion })
    }

    /// Every qubit flips its recorded bit with probability `p`.
    pub fn symmetric(qubits: usize, p: f64) -> Result<Self> {
        Self::new(vec![[[1.0 - p, p], [p, 1.0 - p]]; qubits])
    }

    pub fn identity(qubits: usize) -> Self {
        Self {
            confusion: vec![[[1.0, 0.0], [0.0, 1.0]]; qubits],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.confusion.len()
    }

    pub fn confusion(&self) -> &[Confusion] {
        &self.confusion
    }

    /// Probability that true bit `bit` on qubit `q` is recorded flipped.
    pub fn flip_probability(&self, q: usize, bit: usize) -> f64 {
        self.confusion[q][1 - bit][bit]
    }

    pub fn is_identity(&self) -> bool {
        self.confusion
            .iter()
            .all(|m| m[0][1] == 0.0 && m[1][0] == 0.0)
    }

    /// Pushes a distribution over outcomes (first qubit = high bit) through the noise.
    pub fn apply(&self, dist: &[f64]) -> Result<Vec<f64>> {
        self.check_len(dist)?;
        Ok(apply_local(dist, &self.confusion))
    }

    pub fn inverse(&self) -> Result<Vec<Confusion>> {
        self.confusion
            .iter()
            .enumerate()
            .map(|(q, m)| {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if det.abs() < SINGULAR_TOL {
                    return Err(Error::SingularConfusion(q));
                }
                Ok([
                    [m[1][1] / det, -m[0][1] / det],
                    [-m[1][0] / det, m[0][0] / det],
                ])
            })
            .collect()
    }

    /// Applies the inverse of the tensor-product confusion matrix.
    pub fn unapply(&self, weights: &[f64]) -> Result<Vec<f64>> {
        self.check_len(weights)?;
        Ok(apply_local(weights, &self.inverse()?))
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        let want = 1usize << self.num_qubits();
        if v.len() != want {
            return Err(Error::Dimension {
                expected: want.to_string(),
                got: v.len().to_string(),
            });
        }
        Ok(())
    }
}

/// `(m_0 ⊗ m_1 ⊗ …) v` without forming the full matrix.
fn apply_local(v: &[f64], mats: &[Confusion]) -> Vec<f64> {
    let n = mats.len();
    let mut out = v.to_vec();
    for (q, m) in mats.iter().enumerate() {
        let bit = 1usize << (n - 1 - q);
        for i in (0..out.len()).filter(|i| i & bit == 0) {
            let (v0, v1) = (out[i], out[i | bit]);
            out[i] = m[0][0] * v0 + m[0][1] * v1;
            out[i | bit] = m[1][0] * v0 + m[1][1] * v1;
        }
    }
    out
}

/// Confusion-matrix mitigation of every table. The result keeps the raw
/// total weight per setting and may hold small negative entries.
pub fn mitigate_counts<T: Weight>(
    counts: &[CountsTable<T>],
    noise: &ReadoutNoiseModel,
) -> Result<Vec<CountsTable<f64>>> {
    let inv = noise.inverse()?;
    counts
        .iter()
        .map(|t| {
            let n = t.setting.len();
            if n != noise.num_qubits() {
                return Err(Error::InvalidNoise(format!(
                    "noise covers {} qubits but setting `{}` has {n}",
                    noise.num_qubits(),
                    t.setting
                )));
            }
            let fixed = apply_local(&t.to_dense()?, &inv);
            let outcomes = fixed
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(i, &w)| (index_to_bits(i, n), w))
                .collect();
            Ok(CountsTable {
                setting: t.setting.clone(),
                outcomes,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_stochastic() {
        assert!(ReadoutNoiseModel::new(vec![[[0.9, 0.0], [0.2, 1.0]]]).is_err());
        assert!(ReadoutNoiseModel::new(vec![[[1.1, 0.0], [-0.1, 1.0]]]).is_err());
        assert!(ReadoutNoiseModel::new(vec![]).is_err());
        assert!(ReadoutNoiseModel::symmetric(2, 1.5).is_err());
    }

    #[test]
    fn singular_confusion_detected() {
        let noise = ReadoutNoiseModel::symmetric(2, 0.5).unwrap();
        assert!(matches!(noise.inverse(), Err(Error::SingularConfusion(0))));
    }

    #[test]
    fn apply_then_unapply_is_identity() {
        let noise =
            ReadoutNoiseModel::new(vec![[[0.97, 0.05], [0.03, 0.95]], [[0.9, 0.2], [0.1, 0.8]]])
                .unwrap();
        let dist = [0.1, 0.2, 0.3, 0.4];
        let noisy = noise.apply(&dist).unwrap();
        assert!((noisy.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let back = noise.unapply(&noisy).unwrap();
        for (a, b) in back.iter().zip(dist) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_apply_matches_matrix() {
        let noise = ReadoutNoiseModel::new(vec![[[0.98, 0.1], [0.02, 0.9]]]).unwrap();
        let out = noise.apply(&[0.25, 0.75]).unwrap();
        assert!((out[0] - (0.98 * 0.25 + 0.1 * 0.75)).abs() < 1e-15);
        assert!((out[1] - (0.02 * 0.25 + 0.9 * 0.75)).abs() < 1e-15);
    }

    #[test]
    fn identity_noise_leaves_counts() {
        let t = CountsTable {
            setting: "ZX".parse().unwrap(),
            outcomes: [("01".to_string(), 7u64), ("11".into(), 3)].into(),
        };
        let m = mitigate_counts(&[t], &ReadoutNoiseModel::identity(2)).unwrap();
        assert_eq!(m[0].outcomes.len(), 2);
        assert_eq!(m[0].outcomes["01"], 7.0);
        assert_eq!(m[0].outcomes["11"], 3.0);
    }

    #[test]
    fn width_mismatch_rejected() {
        let t = CountsTable {
            setting: "Z".parse().unwrap(),
            outcomes: [("0".to_string(), 1u64)].into(),
        };
        assert!(mitigate_counts(&[t], &ReadoutNoiseModel::identity(2)).is_err());
    }
}
