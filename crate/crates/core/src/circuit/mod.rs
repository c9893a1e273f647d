//! Gate application, circuits with named stage markers, post-selection and
//! shot sampling.

mod gate;
mod sampling;

pub(crate) use sampling::{histogram_table, index_to_bits};

pub use gate::{standard_gate, Gate, StandardGate, UNITARITY_TOL};
pub use sampling::{
    outcome_distribution, rotate_to_basis, sample_counts, CountsTable, MeasurementSetting,
    PauliBasis, Sampler, Weight,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{Register, StateVector, ZERO};

/// Smallest probability accepted by [`post_select`].
pub const MIN_POST_SELECT_PROBABILITY: f64 = 1e-12;

/// Applies `gate` to `targets` in place.
pub fn apply_gate_mut<S: AsRef<str>>(
    state: &mut StateVector,
    gate: &Gate,
    targets: &[S],
) -> Result<()> {
    if targets.len() != gate.arity() {
        return Err(Error::Arity {
            name: gate.name().to_string(),
            arity: gate.arity(),
            targets: targets.len(),
        });
    }
    let shifts = targets
        .iter()
        .map(|t| state.register().bit_shift(t.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    if shifts.len() == 2 && shifts[0] == shifts[1] {
        return Err(Error::InvalidArgument(format!(
            "gate {} applied twice to the same qubit",
            gate.name()
        )));
    }
    let k = shifts.len();
    let sub = 1usize << k;
    // index offsets of the 2^k local basis states, first target = high bit
    let offsets: Vec<usize> = (0..sub)
        .map(|local| {
            shifts
                .iter()
                .enumerate()
                .filter(|(q, _)| (local >> (k - 1 - q)) & 1 == 1)
                .fold(0, |acc, (_, &s)| acc | 1 << s)
        })
        .collect();
    let mask = offsets[sub - 1];
    let u = gate.unitary();
    let amps = state.amplitudes_mut();
    let mut buf = [ZERO; 4];
    for base in (0..amps.len()).filter(|i| i & mask == 0) {
        for (slot, &off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            amps[base | off] = (0..sub)
                .map(|col| u.get(row, col) * buf[col])
                .sum::<Complex64>();
        }
    }
    Ok(())
}

pub fn apply_gate<S: AsRef<str>>(
    state: &StateVector,
    gate: &Gate,
    targets: &[S],
) -> Result<StateVector> {
    let mut out = state.clone();
    apply_gate_mut(&mut out, gate, targets)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub gate: Gate,
    pub targets: Vec<String>,
}

/// Ordered gate list over a register, with named markers between steps.
///
/// A marker at position `k` names the state after the first `k` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    register: Register,
    steps: Vec<Step>,
    markers: Vec<(String, usize)>,
}

impl Circuit {
    pub fn new(register: Register) -> Self {
        Self {
            register,
            steps: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn markers(&self) -> &[(String, usize)] {
        &self.markers
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push<S: AsRef<str>>(&mut self, gate: Gate, targets: &[S]) -> Result<&mut Self> {
        if targets.len() != gate.arity() {
            return Err(Error::Arity {
                name: gate.name().to_string(),
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        let mut seen: Vec<&str> = Vec::new();
        for t in targets {
            let t = t.as_ref();
            self.register.position(t)?;
            if seen.contains(&t) {
                return Err(Error::InvalidArgument(format!("repeated target `{t}`")));
            }
            seen.push(t);
        }
        self.steps.push(Step {
            gate,
            targets: targets.iter().map(|t| t.as_ref().to_string()).collect(),
        });
        Ok(self)
    }

    pub fn push_std<S: AsRef<str>>(
        &mut self,
        gate: StandardGate,
        targets: &[S],
    ) -> Result<&mut Self> {
        self.push(gate.gate(), targets)
    }

    /// Names the state after all steps pushed so far.
    pub fn mark(&mut self, name: impl Into<String>) -> Result<&mut Self> {
        let name = name.into();
        let at = self.steps.len();
        if self.markers.iter().any(|(n, p)| *n == name || *p >= at) {
            return Err(Error::MarkerOrder(name));
        }
        self.markers.push((name, at));
        Ok(self)
    }

    /// Swaps every step whose gate is named `name` for `replacement`.
    /// Returns how many steps changed.
    pub fn replace_gate(&mut self, name: &str, replacement: &Gate) -> Result<usize> {
        let mut n = 0;
        for step in self.steps.iter_mut().filter(|s| s.gate.name() == name) {
            if replacement.arity() != step.gate.arity() {
                return Err(Error::Arity {
                    name: replacement.name().to_string(),
                    arity: replacement.arity(),
                    targets: step.targets.len(),
                });
            }
            step.gate = replacement.clone();
            n += 1;
        }
        Ok(n)
    }
}

/// Result of [`run_with_snapshots`].
#[derive(Clone, Debug)]
pub struct Run {
    pub final_state: StateVector,
    pub snapshots: Vec<(String, StateVector)>,
}

impl Run {
    pub fn snapshot(&self, name: &str) -> Option<&StateVector> {
        self.snapshots
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }
}

pub fn run_with_snapshots(circuit: &Circuit, initial: &StateVector) -> Result<Run> {
    if initial.register() != circuit.register() {
        return Err(Error::RegisterMismatch(
            initial.register().labels().to_vec(),
            circuit.register().labels().to_vec(),
        ));
    }
    let mut state = initial.clone();
    let mut snapshots = Vec::with_capacity(circuit.markers.len());
    let mut markers = circuit.markers.iter().peekable();
    for (k, step) in circuit.steps.iter().enumerate() {
        while let Some((name, _)) = markers.next_if(|(_, at)| *at == k) {
            snapshots.push((name.clone(), state.clone()));
        }
        apply_gate_mut(&mut state, &step.gate, &step.targets)?;
    }
    for (name, _) in markers {
        snapshots.push((name.clone(), state.clone()));
    }
    Ok(Run {
        final_state: state,
        snapshots,
    })
}

/// Projects `qubit` onto `outcome` and renormalizes. The qubit stays in the register.
pub fn post_select(state: &StateVector, qubit: &str, outcome: u8) -> Result<(f64, StateVector)> {
    if outcome > 1 {
        return Err(Error::InvalidArgument(format!(
            "outcome must be 0 or 1, got {outcome}"
        )));
    }
    let shift = state.register().bit_shift(qubit)?;
    let want = usize::from(outcome);
    let probability = state.outcome_probability(qubit, outcome)?;
    if probability < MIN_POST_SELECT_PROBABILITY {
        return Err(Error::ImpossibleOutcome {
            qubit: qubit.to_string(),
            outcome,
            probability,
        });
    }
    let scale = 1.0 / probability.sqrt();
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if (i >> shift) & 1 == want {
                a * scale
            } else {
                ZERO
            }
        })
        .collect();
    Ok((
        probability,
        StateVector::from_amplitudes(state.register().clone(), amps)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::c;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn reg(labels: &[&str]) -> Register {
        Register::new(labels).unwrap()
    }

    #[test]
    fn x_flips_zero() {
        let s = StateVector::zero(reg(&["q"]));
        let out = apply_gate(&s, &StandardGate::X.gate(), &["q"]).unwrap();
        assert_eq!(out, StateVector::basis(&["q"], "1").unwrap());
    }

    #[test]
    fn cnot_entangles_rotated_control() {
        let theta = 1.1;
        let s = StateVector::zero(reg(&["p", "q"]));
        let s = apply_gate(&s, &StandardGate::Ry(theta).gate(), &["p"]).unwrap();
        let s = apply_gate(&s, &StandardGate::Cnot.gate(), &["p", "q"]).unwrap();
        let (sn, cs) = (theta / 2.0).sin_cos();
        let expected = StateVector::basis(&["p", "q"], "00").unwrap() * cs
            + StateVector::basis(&["p", "q"], "11").unwrap() * sn;
        assert!(s
            .amplitudes()
            .iter()
            .zip(expected.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn control_order_matters() {
        let s = StateVector::basis(&["p", "q"], "01").unwrap();
        let a = apply_gate(&s, &StandardGate::Cnot.gate(), &["p", "q"]).unwrap();
        let b = apply_gate(&s, &StandardGate::Cnot.gate(), &["q", "p"]).unwrap();
        assert_eq!(a, s);
        assert_eq!(b, StateVector::basis(&["p", "q"], "11").unwrap());
    }

    #[test]
    fn arity_and_label_errors() {
        let mut s = StateVector::zero(reg(&["p", "q"]));
        assert!(matches!(
            apply_gate_mut(&mut s, &StandardGate::Cnot.gate(), &["p"]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            apply_gate_mut(&mut s, &StandardGate::X.gate(), &["z"]),
            Err(Error::UnknownLabel(_))
        ));
        assert!(apply_gate_mut(&mut s, &StandardGate::Cnot.gate(), &["p", "p"]).is_err());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s = StateVector::basis(&["p", "q"], "10").unwrap();
        let run = run_with_snapshots(&Circuit::new(reg(&["p", "q"])), &s).unwrap();
        assert_eq!(run.final_state, s);
        assert!(run.snapshots.is_empty());
    }

    #[test]
    fn snapshots_match_prefixes() {
        let mut circ = Circuit::new(reg(&["p", "q"]));
        circ.mark("start").unwrap();
        circ.push_std(StandardGate::H, &["p"]).unwrap();
        circ.mark("h").unwrap();
        circ.push_std(StandardGate::Cnot, &["p", "q"]).unwrap();
        circ.mark("end").unwrap();
        let init = StateVector::zero(reg(&["p", "q"]));
        let run = run_with_snapshots(&circ, &init).unwrap();
        assert_eq!(run.snapshot("start").unwrap(), &init);
        let h = apply_gate(&init, &StandardGate::H.gate(), &["p"]).unwrap();
        assert_eq!(run.snapshot("h").unwrap(), &h);
        assert_eq!(run.snapshot("end").unwrap(), &run.final_state);
    }

    #[test]
    fn markers_must_increase() {
        let mut circ = Circuit::new(reg(&["p"]));
        circ.mark("a").unwrap();
        assert!(matches!(circ.mark("b"), Err(Error::MarkerOrder(_))));
        circ.push_std(StandardGate::X, &["p"]).unwrap();
        assert!(matches!(circ.mark("a"), Err(Error::MarkerOrder(_))));
        circ.mark("b").unwrap();
    }

    #[test]
    fn push_validates_targets() {
        let mut circ = Circuit::new(reg(&["p"]));
        assert!(circ.push_std(StandardGate::X, &["z"]).is_err());
        assert!(circ.push_std(StandardGate::Cnot, &["p"]).is_err());
    }

    #[test]
    fn initial_register_must_match() {
        let circ = Circuit::new(reg(&["p"]));
        assert!(run_with_snapshots(&circ, &StateVector::zero(reg(&["q"]))).is_err());
    }

    #[test]
    fn post_select_plus_state() {
        let plus = StateVector::qubit("q", c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let (p, collapsed) = post_select(&plus, "q", 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(
            (collapsed
                .fidelity(&StateVector::basis(&["q"], "0").unwrap())
                .unwrap()
                - 1.0)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn post_select_impossible() {
        let zero = StateVector::basis(&["q"], "0").unwrap();
        assert!(matches!(
            post_select(&zero, "q", 1),
            Err(Error::ImpossibleOutcome { .. })
        ));
        assert!(post_select(&zero, "q", 2).is_err());
    }

    #[test]
    fn pbs_block_reproduces_reflected_phase() {
        // (c|01> + s|10>)_AB |0>_b through CZ then CY with control B, target b
        let theta = PI / 3.0;
        let (s, co) = (theta / 2.0).sin_cos();
        let labels = ["A", "B", "b"];
        let input = StateVector::basis(&labels, "010").unwrap() * co
            + StateVector::basis(&labels, "100").unwrap() * s;
        let mut out = apply_gate(&input, &StandardGate::Cz.gate(), &["B", "b"]).unwrap();
        apply_gate_mut(&mut out, &StandardGate::Cy.gate(), &["B", "b"]).unwrap();
        // oracle: dense 8x8 product (1_A ⊗ CY)(1_A ⊗ CZ) acting on the input
        let id = crate::qmath::ComplexMatrix::identity(2);
        let block = id
            .kron(StandardGate::Cy.gate().unitary())
            .matmul(&id.kron(StandardGate::Cz.gate().unitary()))
            .unwrap();
        let dense = block.apply(input.amplitudes());
        assert!(out
            .amplitudes()
            .iter()
            .zip(&dense)
            .all(|(a, b)| (a - b).norm() < 1e-15));
        // and the state form with the i phase on the reflected component
        let expected = StateVector::basis(&labels, "011").unwrap() * c(0.0, co)
            + StateVector::basis(&labels, "100").unwrap() * s;
        assert!(out
            .amplitudes()
            .iter()
            .zip(expected.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn replace_gate_swaps_matching_steps() {
        let mut circ = Circuit::new(reg(&["p"]));
        circ.push_std(StandardGate::BeamSplitter, &["p"]).unwrap();
        circ.push_std(StandardGate::X, &["p"]).unwrap();
        assert_eq!(circ.replace_gate("BS", &StandardGate::H.gate()).unwrap(), 1);
        assert_eq!(circ.steps()[0].gate.name(), "H");
        assert!(circ.replace_gate("X", &StandardGate::Cnot.gate()).is_err());
    }
}
