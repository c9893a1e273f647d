//! Simulation and analysis of a six-qubit reality quantum correlator (RQC):
//! an entangled photon pair where one photon crosses a Mach-Zehnder
//! interferometer containing two path-marking atoms, while its partner's
//! polarization is optionally rotated by a quarter-wave plate before a
//! polarizing beam splitter.
//!
//! * [`qmath`]: complex matrices, labelled states, partial traces, entropies.
//! * [`circuit`]: gate library, circuits with stage markers, post-selection, sampling.
//! * [`rqc`]: the experiment circuit, closed-form stage states, Bob's states.
//! * [`measures`]: dephasing, irreality, coherence, discord, entanglement.
//! * [`tomography`]: simulated Pauli tomography with readout noise and mitigation.

pub mod circuit;
pub mod error;
pub mod measures;
pub mod qmath;
pub mod rng;
pub mod rqc;
pub mod tomography;

pub use error::{Error, Result};
