//! Complex linear-algebra substrate: matrices, labelled pure and mixed
//! states, partial traces and entropies.

mod density;
mod entropy;
mod matrix;
mod state;

pub use density::{partial_trace, DensityMatrix, DENSITY_TOL};
pub use entropy::{
    binary_entropy, hermitian_entropy, spectrum_entropy, von_neumann_entropy, EIGEN_CLIP,
};
pub use matrix::{c, kron, ComplexMatrix, I, ONE, ZERO};
pub use state::{equal_up_to_global_phase, Register, StateVector};
