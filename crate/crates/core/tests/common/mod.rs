#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use rqc_core::qmath::{c, ComplexMatrix, DensityMatrix, Register, StateVector};
use rqc_core::rng;

pub const LABELS: [&str; 6] = ["q0", "q1", "q2", "q3", "q4", "q5"];

pub fn register(n: usize) -> Register {
    Register::new(&LABELS[..n]).unwrap()
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_state(n: usize, seed: u64) -> StateVector {
    rng::random_pure_state(register(n), seed)
}

pub fn random_density(n: usize, rank: usize, seed: u64) -> DensityMatrix {
    rng::random_density(register(n), rank, seed).unwrap()
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = rng::seeded_rng(seed);
    let g = gaussian_matrix(&mut rng, dim, dim);
    let h = (&g + &g.adjoint()).scale(c(0.5, 0.0));
    let (vals, vecs) = h.hermitian_eigen().unwrap();
    let phases = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            c(0.0, vals[i]).exp()
        } else {
            c(0.0, 0.0)
        }
    });
    vecs.matmul(&phases)
        .unwrap()
        .matmul(&vecs.adjoint())
        .unwrap()
}
