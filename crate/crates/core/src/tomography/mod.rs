//! Shot-based Pauli tomography with optional readout noise and
//! confusion-matrix mitigation.
//!
//! Pipeline per repetition: counts for all `3^n` settings, optional
//! mitigation, Pauli expectations, linear inversion, projection onto the
//! physical states, irreality of each target qubit.

mod noise;
mod pauli;

pub use noise::{mitigate_counts, Confusion, ReadoutNoiseModel};
pub use pauli::{
    exact_expectations, expectations_from_counts, linear_inversion, pauli_settings, Pauli,
    PauliString, MAX_TOMOGRAPHY_QUBITS,
};

use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{histogram_table, outcome_distribution, CountsTable, Sampler};
use crate::error::{Error, Result};
use crate::measures::{irreality, MeasureTarget};
use crate::qmath::{c, ComplexMatrix, DensityMatrix, Register, StateVector, ZERO};
use crate::rng::{derive_seed, seeded_rng};

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_REPETITIONS: usize = 10;

/// Counts for every setting of [`pauli_settings`] over `qubits`.
///
/// Each shot samples the true outcome, then every bit is flipped
/// independently according to `noise`. Setting `k` draws from
/// `derive_seed(seed, [k])`.
pub fn simulate_counts<S: AsRef<str> + Sync>(
    state: &StateVector,
    qubits: &[S],
    shots: u64,
    noise: Option<&ReadoutNoiseModel>,
    seed: u64,
) -> Result<Vec<CountsTable>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    if let Some(nm) = noise {
        if nm.num_qubits() != qubits.len() {
            return Err(Error::InvalidNoise(format!(
                "noise covers {} qubits, tomography {}",
                nm.num_qubits(),
                qubits.len()
            )));
        }
    }
    let n = qubits.len();
    pauli_settings(n)?
        .into_par_iter()
        .enumerate()
        .map(|(k, setting)| {
            let dist = outcome_distribution(state, qubits, &setting)?;
            let sampler = Sampler::new(&dist)?;
            let mut rng = seeded_rng(derive_seed(seed, &[k as u64]));
            let mut hist = vec![0u64; dist.len()];
            for _ in 0..shots {
                let mut outcome = sampler.draw(&mut rng);
                if let Some(nm) = noise {
                    for q in 0..n {
                        let bit = 1usize << (n - 1 - q);
                        let p = nm.flip_probability(q, usize::from(outcome & bit != 0));
                        if rng.gen::<f64>() < p {
                            outcome ^= bit;
                        }
                    }
                }
                hist[outcome] += 1;
            }
            Ok(histogram_table(setting, &hist))
        })
        .collect()
}

/// Nearest probability vector to `eigenvalues` in the 2-norm, keeping order.
///
/// The spectrum is first shifted uniformly to unit sum. Negative entries are
/// then zeroed and their total spread evenly over the entries still free,
/// until none is negative.
pub fn water_fill(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if eigenvalues.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroSpectrum);
    }
    let n = eigenvalues.len() as f64;
    let shift = (1.0 - eigenvalues.iter().sum::<f64>()) / n;
    let mut lam: Vec<f64> = eigenvalues.iter().map(|v| v + shift).collect();
    let mut fixed = vec![false; lam.len()];
    loop {
        let mut deficit = 0.0;
        for (l, f) in lam.iter_mut().zip(fixed.iter_mut()) {
            if !*f && *l < 0.0 {
                deficit += *l;
                *l = 0.0;
                *f = true;
            }
        }
        if deficit == 0.0 {
            break;
        }
        let free = fixed.iter().filter(|f| !**f).count();
        for (l, _) in lam.iter_mut().zip(&fixed).filter(|(_, f)| !**f) {
            *l += deficit / free as f64;
        }
    }
    Ok(lam)
}

/// Closest density matrix to a Hermitian estimate: water-filled spectrum,
/// eigenvectors unchanged.
pub fn project_to_physical(h: &ComplexMatrix, register: Register) -> Result<DensityMatrix> {
    let (values, vectors) = h.hermitian_eigen()?;
    if values.iter().all(|v| v.abs() <= f64::EPSILON) {
        return Err(Error::ZeroSpectrum);
    }
    let lam = water_fill(&values)?;
    let dim = h.rows();
    let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
        lam.iter().enumerate().fold(ZERO, |acc, (k, &l)| {
            acc + vectors.get(i, k) * vectors.get(j, k).conj() * c(l, 0.0)
        })
    });
    DensityMatrix::new(register, m)
}

/// Parameters of a tomography run.
#[derive(Clone, Debug, PartialEq)]
pub struct TomographyJob {
    pub qubits: Vec<String>,
    pub shots: u64,
    pub noise: Option<ReadoutNoiseModel>,
    /// Without a noise model, mitigation is the identity.
    pub mitigate: bool,
    pub repetitions: usize,
    pub seed: u64,
    /// Qubits whose irreality is estimated; defaults to all of `qubits`.
    pub targets: Vec<String>,
}

impl TomographyJob {
    pub fn new<S: AsRef<str>>(qubits: &[S]) -> Self {
        let qubits: Vec<String> = qubits.iter().map(|q| q.as_ref().to_string()).collect();
        Self {
            targets: qubits.clone(),
            qubits,
            shots: DEFAULT_SHOTS,
            noise: None,
            mitigate: false,
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
        }
    }

    pub fn shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn noise(mut self, noise: Option<ReadoutNoiseModel>) -> Self {
        self.noise = noise;
        self
    }

    pub fn mitigate(mut self, on: bool) -> Self {
        self.mitigate = on;
        self
    }

    pub fn repetitions(mut self, reps: usize) -> Self {
        self.repetitions = reps;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn targets<S: AsRef<str>>(mut self, targets: &[S]) -> Self {
        self.targets = targets.iter().map(|t| t.as_ref().to_string()).collect();
        self
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let reg = Register::new(&self.qubits)?;
        for t in &self.targets {
            reg.position(t)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetEstimate {
    pub target: String,
    /// One estimate per repetition.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; zero for a single repetition.
    pub std: f64,
}

/// Outcome of [`reconstruct`]. Counts and state are those of repetition 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionReport {
    pub qubits: Vec<String>,
    pub settings: usize,
    pub shots: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub raw_counts: Vec<CountsTable>,
    pub mitigated_counts: Option<Vec<CountsTable<f64>>>,
    pub state: DensityMatrix,
    pub estimates: Vec<TargetEstimate>,
}

impl ReconstructionReport {
    pub fn estimate(&self, target: &str) -> Option<&TargetEstimate> {
        self.estimates.iter().find(|e| e.target == target)
    }
}

struct Repetition {
    raw: Vec<CountsTable>,
    mitigated: Option<Vec<CountsTable<f64>>>,
    state: DensityMatrix,
    values: Vec<f64>,
}

fn run_repetition(state: &StateVector, job: &TomographyJob, seed: u64) -> Result<Repetition> {
    let raw = simulate_counts(state, &job.qubits, job.shots, job.noise.as_ref(), seed)?;
    let mitigated = if job.mitigate {
        let identity = ReadoutNoiseModel::identity(job.qubits.len());
        Some(mitigate_counts(
            &raw,
            job.noise.as_ref().unwrap_or(&identity),
        )?)
    } else {
        None
    };
    let expectations = match &mitigated {
        Some(m) => expectations_from_counts(m)?,
        None => expectations_from_counts(&raw)?,
    };
    let rho = project_to_physical(
        &linear_inversion(&expectations)?,
        Register::new(&job.qubits)?,
    )?;
    let values = job
        .targets
        .iter()
        .map(|t| irreality(&rho, &MeasureTarget::qubit(t.as_str())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Repetition {
        raw,
        mitigated,
        state: rho,
        values,
    })
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs the full pipeline `job.repetitions` times; repetition `r` uses
/// `derive_seed(job.seed, [r])`.
pub fn reconstruct(state: &StateVector, job: &TomographyJob) -> Result<ReconstructionReport> {
    job.validate()?;
    let reps = (0..job.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(state, job, derive_seed(job.seed, &[r as u64])))
        .collect::<Result<Vec<_>>>()?;
    let estimates = job
        .targets
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let values: Vec<f64> = reps.iter().map(|r| r.values[k]).collect();
            let (mean, std) = mean_std(&values);
            TargetEstimate {
                target: t.clone(),
                values,
                mean,
                std,
            }
        })
        .collect();
    let first = reps.into_iter().next().expect("at least one repetition");
    Ok(ReconstructionReport {
        qubits: job.qubits.clone(),
        settings: first.raw.len(),
        shots: job.shots,
        repetitions: job.repetitions,
        seed: job.seed,
        raw_counts: first.raw,
        mitigated_counts: first.mitigated,
        state: first.state,
        estimates,
    })
}
