//! Deterministic RNG plumbing. Every sampling routine takes an explicit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qmath::{c, ComplexMatrix, DensityMatrix, Register, StateVector};

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for an independent sub-task, e.g. `(seed, repetition, setting)`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Unit vector with i.i.d. complex Gaussian amplitudes (Haar-distributed).
pub fn random_pure_state(register: Register, seed: u64) -> StateVector {
    let g = gaussian_matrix(&mut seeded_rng(seed), register.dim(), 1);
    let amps = (0..register.dim()).map(|i| g.get(i, 0)).collect();
    StateVector::from_amplitudes(register, amps)
        .and_then(|s| s.normalized())
        .expect("a Gaussian vector is nonzero")
}

/// `G G† / tr(G G†)` for a complex Gaussian `G` with `rank` columns.
pub fn random_density(register: Register, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let g = gaussian_matrix(&mut seeded_rng(seed), register.dim(), rank);
    let m = g.matmul(&g.adjoint())?;
    let tr = m.trace().re;
    DensityMatrix::new(register, m.scale(c(1.0 / tr, 0.0)))
}
