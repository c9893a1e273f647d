//! The reality quantum correlator experiment.
//!
//! Six qubits, ordered `(A, a, B, b, e1, e2)`: polarization and path of
//! photons 𝒜 and ℬ, then the energies of atoms 1 and 2. Photon ℬ runs
//! through PBS, HWP, the photon-atom interaction, mirrors and a beam
//! splitter; Alice optionally applies a quarter-wave plate to `A` and then
//! her own PBS. Alice's block commutes with everything Bob does, so it can
//! be inserted right after the HWP (stage 2) or after the beam splitter
//! (stage 5) and the final state is the same.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;

use crate::circuit::{post_select, run_with_snapshots, Circuit, Run, StandardGate};
use crate::error::{Error, Result};
use crate::measures::{coherence_rel_entropy, MeasureTarget};
use crate::qmath::{binary_entropy, c, DensityMatrix, Register, StateVector, I};

pub const REGISTER: [&str; 6] = ["A", "a", "B", "b", "e1", "e2"];

pub fn register() -> Register {
    Register::new(&REGISTER).expect("distinct labels")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qwp {
    In,
    Out,
}

impl fmt::Display for Qwp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::In => "in",
            Self::Out => "out",
        })
    }
}

/// Where Alice's QWP/PBS_A block sits in the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterventionPoint {
    /// After the HWP, before ℬ meets the atoms.
    Stage2,
    /// At the output of the interferometer.
    Stage5,
}

impl fmt::Display for InterventionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stage2 => "stage2",
            Self::Stage5 => "stage5",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RqcConfig {
    theta: f64,
    pub qwp: Qwp,
    atoms: u8,
    pub intervention: InterventionPoint,
    pub post_select_a: Option<u8>,
    pub post_select_b: Option<u8>,
}

impl RqcConfig {
    /// Two atoms, QWP out, Alice acting at stage 5 with the default
    /// post-selection `a = 0, b = 0`.
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::Domain {
                value: theta,
                domain: "[0, pi/2]",
            });
        }
        Ok(Self {
            theta,
            qwp: Qwp::Out,
            atoms: 2,
            intervention: InterventionPoint::Stage5,
            post_select_a: Some(0),
            post_select_b: Some(0),
        })
    }

    pub fn with_qwp(mut self, qwp: Qwp) -> Self {
        self.qwp = qwp;
        self
    }

    pub fn with_atoms(mut self, atoms: u8) -> Result<Self> {
        if !(1..=2).contains(&atoms) {
            return Err(Error::InvalidArgument(format!(
                "atoms must be 1 or 2, got {atoms}"
            )));
        }
        self.atoms = atoms;
        Ok(self)
    }

    /// Moves Alice's block and resets the detector post-selection to the
    /// one analysed for that point: `a = 0` at stage 2, `a = b = 0` at stage 5.
    pub fn at(mut self, point: InterventionPoint) -> Self {
        self.intervention = point;
        self.post_select_a = Some(0);
        self.post_select_b = match point {
            InterventionPoint::Stage2 => None,
            InterventionPoint::Stage5 => Some(0),
        };
        self
    }

    pub fn with_post_selection(mut self, a: Option<u8>, b: Option<u8>) -> Self {
        self.post_select_a = a;
        self.post_select_b = b;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn atoms(&self) -> u8 {
        self.atoms
    }

    /// `cos(θ/2)`.
    pub fn c(&self) -> f64 {
        (self.theta / 2.0).cos()
    }

    /// `sin(θ/2)`.
    pub fn s(&self) -> f64 {
        (self.theta / 2.0).sin()
    }

    /// Qubits Bob reports irrealities for.
    pub fn report_targets(&self) -> Vec<&'static str> {
        match (self.intervention, self.atoms) {
            (InterventionPoint::Stage2, _) => vec!["b"],
            (InterventionPoint::Stage5, 1) => vec!["e1"],
            (InterventionPoint::Stage5, _) => vec!["e1", "e2"],
        }
    }

    /// Qubits covered by tomography; `a` mirrors `A` and `B` is uncorrelated.
    pub fn tomography_qubits(&self) -> Vec<&'static str> {
        match (self.intervention, self.atoms) {
            (InterventionPoint::Stage2, _) => vec!["A", "b"],
            (InterventionPoint::Stage5, 1) => vec!["A", "b", "e1"],
            (InterventionPoint::Stage5, _) => vec!["A", "b", "e1", "e2"],
        }
    }
}

/// Named checkpoints, in circuit order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StageId {
    Psi0,
    Psi1,
    Psi2,
    /// After Alice's block applied at stage 2.
    Psi2Branch,
    Psi3,
    Psi4,
    Psi5,
    /// After Alice's block applied at stage 5.
    Psi5Branch,
}

impl StageId {
    pub const ALL: [StageId; 8] = [
        StageId::Psi0,
        StageId::Psi1,
        StageId::Psi2,
        StageId::Psi2Branch,
        StageId::Psi3,
        StageId::Psi4,
        StageId::Psi5,
        StageId::Psi5Branch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Psi0 => "psi0",
            Self::Psi1 => "psi1",
            Self::Psi2 => "psi2",
            Self::Psi2Branch => "psi2_branch",
            Self::Psi3 => "psi3",
            Self::Psi4 => "psi4",
            Self::Psi5 => "psi5",
            Self::Psi5Branch => "psi5_branch",
        }
    }

    /// Intervention point whose circuit carries this marker.
    fn circuit_point(self) -> InterventionPoint {
        match self {
            Self::Psi2Branch => InterventionPoint::Stage2,
            _ => InterventionPoint::Stage5,
        }
    }
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn alice_block(circ: &mut Circuit, qwp: Qwp) -> Result<()> {
    if qwp == Qwp::In {
        circ.push_std(StandardGate::QuarterWavePlate, &["A"])?;
    }
    circ.push_std(StandardGate::Cz, &["A", "a"])?;
    circ.push_std(StandardGate::Cy, &["A", "a"])?;
    Ok(())
}

/// Builds the six-qubit circuit with a marker at every stage it reaches.
///
/// With Alice at stage 5 the markers are `Ψ0…Ψ5, Ψ5_branch`. With Alice at
/// stage 2 they are `Ψ0, Ψ1, Ψ2, Ψ2_branch, Ψ5_branch`: the intermediate
/// Bob stages then include Alice's action and have no separate closed form.
pub fn build_rqc(config: &RqcConfig) -> Circuit {
    build(config).expect("fixed circuit layout is valid")
}

fn build(config: &RqcConfig) -> Result<Circuit> {
    use StandardGate::*;
    let late = config.intervention == InterventionPoint::Stage5;
    let two_atoms = config.atoms == 2;
    let mut circ = Circuit::new(register());

    // BBO': c|01> + s|10> on AB
    circ.push_std(Ry(config.theta), &["A"])?;
    circ.push_std(Cnot, &["A", "B"])?;
    circ.push_std(X, &["B"])?;
    // atoms start excited
    circ.push_std(X, &["e1"])?;
    if two_atoms {
        circ.push_std(X, &["e2"])?;
    }
    circ.mark(StageId::Psi0.name())?;

    // PBS: polarization controls path
    circ.push_std(Cz, &["B", "b"])?;
    circ.push_std(Cy, &["B", "b"])?;
    circ.mark(StageId::Psi1.name())?;

    // HWP
    circ.push_std(Cnot, &["b", "B"])?;
    circ.mark(StageId::Psi2.name())?;

    if !late {
        alice_block(&mut circ, config.qwp)?;
        circ.mark(StageId::Psi2Branch.name())?;
    }

    // PAI: atom 1 sits in the upper path (b = 0), atom 2 in the lower (b = 1)
    circ.push_std(X, &["b"])?;
    circ.push_std(Cnot, &["b", "e1"])?;
    circ.push_std(X, &["b"])?;
    if two_atoms {
        circ.push_std(Cnot, &["b", "e2"])?;
    }
    if late {
        circ.mark(StageId::Psi3.name())?;
    }

    circ.push_std(Mirror, &["b"])?;
    if late {
        circ.mark(StageId::Psi4.name())?;
    }

    circ.push_std(BeamSplitter, &["b"])?;
    if late {
        circ.mark(StageId::Psi5.name())?;
        alice_block(&mut circ, config.qwp)?;
    }
    circ.mark(StageId::Psi5Branch.name())?;
    Ok(circ)
}

/// Runs `circuit` from `|000000⟩`.
pub fn simulate(circuit: &Circuit) -> Result<Run> {
    run_with_snapshots(circuit, &StateVector::zero(circuit.register().clone()))
}

/// Simulated state at `stage`, taken from the circuit that carries its marker.
pub fn stage_state(stage: StageId, config: &RqcConfig) -> Result<StateVector> {
    stage_state_in(stage, config, |_| {})
}

/// Like [`stage_state`], with a hook that may edit the circuit before it runs.
pub fn stage_state_in(
    stage: StageId,
    config: &RqcConfig,
    edit: impl Fn(&mut Circuit),
) -> Result<StateVector> {
    let cfg = RqcConfig {
        intervention: stage.circuit_point(),
        ..*config
    };
    let mut circ = build_rqc(&cfg);
    edit(&mut circ);
    let run = simulate(&circ)?;
    run.snapshot(stage.name())
        .cloned()
        .ok_or(Error::UndefinedStage {
            stage: stage.name().to_string(),
            reason: "marker missing from circuit",
        })
}

// ---------------------------------------------------------------------------
// Closed forms, written independently of the circuit engine
// ---------------------------------------------------------------------------

fn ket(labels: &[&str], bits: &str) -> StateVector {
    StateVector::basis(labels, bits).expect("well-formed ket")
}

/// Tensor product of factors, permuted into register order.
fn product(factors: &[StateVector]) -> StateVector {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter()
        .fold(first.clone(), |acc, f| {
            acc.tensor(f).expect("disjoint labels")
        })
        .reorder(&REGISTER)
        .expect("factors cover the register")
}

fn beta(cfg: &RqcConfig, sign: f64) -> StateVector {
    StateVector::qubit("b", c(cfg.s(), 0.0), c(0.0, sign * cfg.c())).expect("qubit")
}

fn omega(sign: f64) -> StateVector {
    StateVector::qubit("b", c(FRAC_1_SQRT_2, 0.0), c(0.0, sign * FRAC_1_SQRT_2)).expect("qubit")
}

fn xi(cfg: &RqcConfig, sign: f64) -> StateVector {
    ket(&["e1", "e2"], "01") * cfg.s() + ket(&["e1", "e2"], "10") * (sign * cfg.c())
}

/// Closed-form state at `stage`, up to global phase.
pub fn oracle_state(stage: StageId, config: &RqcConfig) -> Result<StateVector> {
    use StageId::*;
    let (co, s) = (config.c(), config.s());
    let ic = I * co;
    let is = I * s;
    let ee = if config.atoms == 2 { "11" } else { "10" };
    let e = ["e1", "e2"];
    if config.atoms == 1 && stage >= Psi3 && stage != Psi2Branch {
        return Err(Error::UndefinedStage {
            stage: stage.name().to_string(),
            reason: "closed forms after the atom interaction assume two atoms",
        });
    }
    let psi = match stage {
        Psi0 => {
            let ab = ket(&["A", "B"], "01") * co + ket(&["A", "B"], "10") * s;
            product(&[ab, ket(&["a", "b"], "00"), ket(&e, ee)])
        }
        Psi1 => {
            let abb = ket(&["A", "B", "b"], "011") * ic + ket(&["A", "B", "b"], "100") * s;
            product(&[abb, ket(&["a"], "0"), ket(&e, ee)])
        }
        Psi2 => {
            let ab = ket(&["A", "b"], "01") * ic + ket(&["A", "b"], "10") * s;
            product(&[ab, ket(&["B", "a"], "00"), ket(&e, ee)])
        }
        Psi3 => {
            let t1 = product(&[
                ket(&["A", "b"], "01"),
                ket(&e, "10"),
                ket(&["B", "a"], "00"),
            ]);
            let t2 = product(&[
                ket(&["A", "b"], "10"),
                ket(&e, "01"),
                ket(&["B", "a"], "00"),
            ]);
            t1 * ic + t2 * s
        }
        Psi4 => {
            let t1 = product(&[
                ket(&["A", "b"], "00"),
                ket(&e, "10"),
                ket(&["B", "a"], "00"),
            ]);
            let t2 = product(&[
                ket(&["A", "b"], "11"),
                ket(&e, "01"),
                ket(&["B", "a"], "00"),
            ]);
            t1 * (-co) + t2 * is
        }
        Psi5 => {
            let t1 = product(&[
                ket(&["A", "e1", "e2"], "010"),
                omega(1.0),
                ket(&["B", "a"], "00"),
            ]);
            let t2 = product(&[
                ket(&["A", "e1", "e2"], "101"),
                omega(-1.0),
                ket(&["B", "a"], "00"),
            ]);
            t1 * co + t2 * s
        }
        Psi2Branch => match config.qwp {
            Qwp::Out => {
                let aab = ket(&["A", "a", "b"], "001") * co + ket(&["A", "a", "b"], "110") * s;
                product(&[aab, ket(&["B"], "0"), ket(&e, ee)]) * I
            }
            Qwp::In => {
                let t1 = product(&[
                    ket(&["A", "a"], "00"),
                    beta(config, 1.0),
                    ket(&["B"], "0"),
                    ket(&e, ee),
                ]);
                let t2 = product(&[
                    ket(&["A", "a"], "11"),
                    beta(config, -1.0),
                    ket(&["B"], "0"),
                    ket(&e, ee),
                ]);
                (t1 + t2) * FRAC_1_SQRT_2
            }
        },
        Psi5Branch => match config.qwp {
            Qwp::Out => {
                let t1 = product(&[
                    ket(&["A", "a", "e1", "e2"], "0010"),
                    omega(1.0),
                    ket(&["B"], "0"),
                ]);
                let t2 = product(&[
                    ket(&["A", "a", "e1", "e2"], "1101"),
                    omega(-1.0),
                    ket(&["B"], "0"),
                ]);
                t1 * co + t2 * is
            }
            Qwp::In => {
                let term = |aab: &str, sign: f64| {
                    product(&[
                        ket(&["A", "a", "b"], aab),
                        xi(config, sign),
                        ket(&["B"], "0"),
                    ])
                };
                (term("000", 1.0) - term("001", -1.0) * I + term("110", -1.0)
                    - term("111", 1.0) * I)
                    * 0.5
            }
        },
    };
    Ok(psi)
}

// ---------------------------------------------------------------------------
// Bob's side
// ---------------------------------------------------------------------------

fn branch_stage(point: InterventionPoint) -> StageId {
    match point {
        InterventionPoint::Stage2 => StageId::Psi2Branch,
        InterventionPoint::Stage5 => StageId::Psi5Branch,
    }
}

/// State right after Alice's block at the configured intervention point.
pub fn branch_state(config: &RqcConfig) -> Result<StateVector> {
    stage_state(branch_stage(config.intervention), config)
}

/// Applies the configured detector post-selections to the branch state.
/// Returns the joint probability and the collapsed six-qubit state.
pub fn post_selected_branch(config: &RqcConfig) -> Result<(f64, StateVector)> {
    let mut psi = branch_state(config)?;
    let mut prob = 1.0;
    for (label, outcome) in [("a", config.post_select_a), ("b", config.post_select_b)] {
        if let Some(o) = outcome {
            let (p, collapsed) = post_select(&psi, label, o)?;
            prob *= p;
            psi = collapsed;
        }
    }
    Ok((prob, psi))
}

/// Bob's state on `(B, b, e1, e2)` after post-selection, Alice's qubits traced out.
pub fn bob_state(config: &RqcConfig) -> Result<DensityMatrix> {
    let (_, psi) = post_selected_branch(config)?;
    DensityMatrix::from_pure(&psi).partial_trace(&["A", "a"])
}

/// Closed-form irreality of Bob's reported targets: zero with the QWP out,
/// `h(cos²(θ/2))` with it in.
pub fn predicted_irreality(config: &RqcConfig) -> f64 {
    match config.qwp {
        Qwp::Out => 0.0,
        Qwp::In => binary_entropy(config.c() * config.c()).expect("cos^2 lies in [0, 1]"),
    }
}

/// Reduced state over the tomography qubits, without any post-selection.
pub fn tomography_state(config: &RqcConfig) -> Result<DensityMatrix> {
    let psi = branch_state(config)?;
    DensityMatrix::from_pure(&psi).reduce_to(&config.tomography_qubits())
}

/// Relative entropy of coherence of atom 1 in Bob's post-selected state.
pub fn atom_coherence(config: &RqcConfig) -> Result<f64> {
    coherence_rel_entropy(&bob_state(config)?, &MeasureTarget::qubit("e1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::irreality;
    use crate::qmath::equal_up_to_global_phase;
    use std::f64::consts::PI;

    fn cfg(theta: f64, qwp: Qwp) -> RqcConfig {
        RqcConfig::new(theta).unwrap().with_qwp(qwp)
    }

    #[test]
    fn theta_domain() {
        assert!(RqcConfig::new(-0.1).is_err());
        assert!(RqcConfig::new(PI).is_err());
        assert!(RqcConfig::new(f64::NAN).is_err());
        assert!(RqcConfig::new(FRAC_PI_2).is_ok());
        assert!(RqcConfig::new(0.0).unwrap().with_atoms(3).is_err());
    }

    #[test]
    fn source_state() {
        for theta in [0.0, 0.4, FRAC_PI_2] {
            let sim = stage_state(StageId::Psi0, &cfg(theta, Qwp::In)).unwrap();
            let or = oracle_state(StageId::Psi0, &cfg(theta, Qwp::In)).unwrap();
            assert!(equal_up_to_global_phase(&sim, &or, 1e-12).unwrap());
        }
    }

    #[test]
    fn psi2_at_maximal_entanglement() {
        // (i|01> + |10>)_Ab |00>_Ba |11> / sqrt2
        let cfg = cfg(FRAC_PI_2, Qwp::Out);
        let labels = ["A", "b", "B", "a", "e1", "e2"];
        let expected = (ket(&labels, "010011") * I + ket(&labels, "100011")) * FRAC_1_SQRT_2;
        let expected = expected.reorder(&REGISTER).unwrap();
        let sim = stage_state(StageId::Psi2, &cfg).unwrap();
        assert!(sim.fidelity(&expected).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn psi5_without_entanglement() {
        // θ = 0: |010>_{A e1 e2} |ω+>_b |00>_{Ba}
        let or = oracle_state(StageId::Psi5, &cfg(0.0, Qwp::Out)).unwrap();
        let expected = product(&[
            ket(&["A", "e1", "e2"], "010"),
            omega(1.0),
            ket(&["B", "a"], "00"),
        ]);
        assert!(or.fidelity(&expected).unwrap() > 1.0 - 1e-15);
        let sim = stage_state(StageId::Psi5, &cfg(0.0, Qwp::Out)).unwrap();
        assert!(sim.fidelity(&expected).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn no_entanglement_single_branch() {
        let run = simulate(&build_rqc(&cfg(0.0, Qwp::Out))).unwrap();
        let nonzero = run
            .final_state
            .amplitudes()
            .iter()
            .filter(|a| a.norm() > 1e-12)
            .count();
        // the BS leaves b in superposition: one basis branch for everything else
        assert_eq!(nonzero, 2);
        let (_, collapsed) = post_select(&run.final_state, "b", 0).unwrap();
        assert_eq!(
            collapsed
                .amplitudes()
                .iter()
                .filter(|a| a.norm() > 1e-12)
                .count(),
            1
        );
    }

    #[test]
    fn branch_stage5_qwp_in_at_maximal_entanglement() {
        let cfg = cfg(FRAC_PI_2, Qwp::In);
        let sim = stage_state(StageId::Psi5Branch, &cfg).unwrap();
        let or = oracle_state(StageId::Psi5Branch, &cfg).unwrap();
        assert!(or.fidelity(&sim).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn psi2_branch_qwp_in_at_pi_over_3() {
        let cfg = cfg(PI / 3.0, Qwp::In);
        let sim = stage_state(StageId::Psi2Branch, &cfg).unwrap();
        let or = oracle_state(StageId::Psi2Branch, &cfg).unwrap();
        assert!(or.fidelity(&sim).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn post_select_stage2_out() {
        let theta = 1.0;
        let cfg = cfg(theta, Qwp::Out).at(InterventionPoint::Stage2);
        let (p, psi) = post_selected_branch(&cfg).unwrap();
        // amplitude-squared oracle on i(c|001>+s|110>)_Aab|011>: only the c term has a = 0
        assert!((p - (theta / 2.0).cos().powi(2)).abs() < 1e-14);
        assert!(psi.fidelity(&ket(&REGISTER, "000111")).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn bob_states_match_closed_forms() {
        let bob = ["B", "b", "e1", "e2"];
        let out2 = bob_state(&cfg(0.9, Qwp::Out).at(InterventionPoint::Stage2)).unwrap();
        assert!(out2.fidelity_with_pure(&ket(&bob, "0111")).unwrap() > 1.0 - 1e-12);

        let out5 = bob_state(&cfg(0.9, Qwp::Out)).unwrap();
        assert!(out5.fidelity_with_pure(&ket(&bob, "0010")).unwrap() > 1.0 - 1e-12);

        let c5 = cfg(0.9, Qwp::In);
        let in5 = bob_state(&c5).unwrap();
        let expected = ket(&["B", "b"], "00").tensor(&xi(&c5, 1.0)).unwrap();
        assert!(in5.fidelity_with_pure(&expected).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn predicted_values() {
        assert_eq!(predicted_irreality(&cfg(0.7, Qwp::Out)), 0.0);
        assert!((predicted_irreality(&cfg(FRAC_PI_2, Qwp::In)) - 1.0).abs() < 1e-15);
        let h34 = 0.811_278_124_459_132_8;
        assert!((predicted_irreality(&cfg(PI / 3.0, Qwp::In)) - h34).abs() < 1e-12);
    }

    #[test]
    fn measured_matches_predicted() {
        for theta in [0.0, 0.3, PI / 4.0, PI / 3.0, FRAC_PI_2] {
            for qwp in [Qwp::In, Qwp::Out] {
                for point in [InterventionPoint::Stage2, InterventionPoint::Stage5] {
                    let cfg = cfg(theta, qwp).at(point);
                    let rho = bob_state(&cfg).unwrap();
                    for t in cfg.report_targets() {
                        let v = irreality(&rho, &t.into()).unwrap();
                        assert!(
                            (v - predicted_irreality(&cfg)).abs() < 1e-10,
                            "{theta} {qwp} {point} {t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn impossible_post_selection_propagates() {
        // θ = 0 with QWP out: the a = 1 detector never fires
        let cfg = cfg(0.0, Qwp::Out).with_post_selection(Some(1), None);
        assert!(matches!(
            bob_state(&cfg),
            Err(Error::ImpossibleOutcome { .. })
        ));
    }

    #[test]
    fn one_atom_oracles_are_limited() {
        let cfg = cfg(0.5, Qwp::In).with_atoms(1).unwrap();
        assert!(oracle_state(StageId::Psi2Branch, &cfg).is_ok());
        assert!(matches!(
            oracle_state(StageId::Psi3, &cfg),
            Err(Error::UndefinedStage { .. })
        ));
        let sim = stage_state(StageId::Psi2, &cfg).unwrap();
        assert!(
            oracle_state(StageId::Psi2, &cfg)
                .unwrap()
                .fidelity(&sim)
                .unwrap()
                > 1.0 - 1e-12
        );
    }

    #[test]
    fn timing_of_alice_is_irrelevant_for_final_state() {
        for qwp in [Qwp::In, Qwp::Out] {
            let early = simulate(&build_rqc(&cfg(0.8, qwp).at(InterventionPoint::Stage2))).unwrap();
            let late = simulate(&build_rqc(&cfg(0.8, qwp))).unwrap();
            assert!(early.final_state.fidelity(&late.final_state).unwrap() > 1.0 - 1e-14);
        }
    }
}
