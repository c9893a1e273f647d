//! Front end for the `rqc` binary: θ sweeps in exact or tomography mode and
//! a self-verification suite.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rqc_core::circuit::{Circuit, Gate, StandardGate};
use rqc_core::measures::{decompose, dephase, irreality, MeasureTarget};
use rqc_core::qmath::{binary_entropy, Register};
use rqc_core::rng::{derive_seed, random_density};
use rqc_core::rqc::{
    atom_coherence, bob_state, branch_state, build_rqc, oracle_state, predicted_irreality,
    simulate, stage_state_in, tomography_state, InterventionPoint, Qwp, RqcConfig, StageId,
};
use rqc_core::tomography::{reconstruct, ReadoutNoiseModel, TomographyJob};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid run spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] rqc_core::Error),
    #[error("cannot read config {path}: {source}")]
    Config { path: PathBuf, source: io::Error },
    #[error("bad config file: {0}")]
    ConfigFormat(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Tomography,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Stage2,
    Stage5,
}

impl From<Scenario> for InterventionPoint {
    fn from(s: Scenario) -> Self {
        match s {
            Scenario::Stage2 => InterventionPoint::Stage2,
            Scenario::Stage5 => InterventionPoint::Stage5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QwpSetting {
    In,
    Out,
}

impl From<QwpSetting> for Qwp {
    fn from(q: QwpSetting) -> Self {
        match q {
            QwpSetting::In => Qwp::In,
            QwpSetting::Out => Qwp::Out,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a sweep needs. Angles are radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub mode: Mode,
    pub scenario: Scenario,
    pub qwp: QwpSetting,
    pub theta_start: f64,
    pub theta_stop: f64,
    pub steps: usize,
    pub atoms: u8,
    pub shots: u64,
    pub reps: usize,
    pub readout_p: f64,
    pub mitigate: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            scenario: Scenario::Stage2,
            qwp: QwpSetting::In,
            theta_start: 0.0,
            theta_stop: FRAC_PI_2,
            steps: 33,
            atoms: 2,
            shots: 8192,
            reps: 10,
            readout_p: 0.0,
            mitigate: false,
            seed: 20_240_101,
            out: None,
            format: Format::Csv,
        }
    }
}

impl RunSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Invalid(msg));
        for (name, v) in [
            ("theta-start", self.theta_start),
            ("theta-stop", self.theta_stop),
        ] {
            if !(0.0..=FRAC_PI_2).contains(&v) {
                return bad(format!("{name} = {v} lies outside [0, pi/2]"));
            }
        }
        if self.theta_start > self.theta_stop {
            return bad("theta-start exceeds theta-stop".into());
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        if !(1..=2).contains(&self.atoms) {
            return bad(format!("atoms must be 1 or 2, got {}", self.atoms));
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if !(0.0..0.5).contains(&self.readout_p) {
            return bad(format!(
                "readout-p = {} lies outside [0, 0.5)",
                self.readout_p
            ));
        }
        Ok(())
    }

    /// Evenly spaced angles; the last point is exactly `theta_stop`.
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.theta_start];
        }
        let span = self.theta_stop - self.theta_start;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.theta_stop
                } else {
                    self.theta_start + span * k as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }

    pub fn config(&self, theta: f64) -> Result<RqcConfig, CliError> {
        Ok(RqcConfig::new(theta)?
            .with_qwp(self.qwp.into())
            .with_atoms(self.atoms)?
            .at(self.scenario.into()))
    }
}

/// One output row. Tomography fields are empty in exact mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub theta_rad: f64,
    pub scenario: Scenario,
    pub qwp: QwpSetting,
    pub target: String,
    pub irreality_exact: f64,
    pub irreality_predicted: f64,
    pub irreality_est: Option<f64>,
    pub irreality_std: Option<f64>,
    pub shots: Option<u64>,
    pub repetitions: Option<usize>,
    pub mitigated: Option<bool>,
    pub seed: Option<u64>,
}

fn point_records(spec: &RunSpec, index: usize, theta: f64) -> Result<Vec<Record>, CliError> {
    let cfg = spec.config(theta)?;
    let bob = bob_state(&cfg)?;
    let predicted = predicted_irreality(&cfg);
    let targets = cfg.report_targets();
    let report = match spec.mode {
        Mode::Exact => None,
        Mode::Tomography => {
            let qubits = cfg.tomography_qubits();
            let noise = if spec.readout_p > 0.0 {
                Some(ReadoutNoiseModel::symmetric(qubits.len(), spec.readout_p)?)
            } else {
                None
            };
            let job = TomographyJob::new(&qubits)
                .targets(&targets)
                .shots(spec.shots)
                .repetitions(spec.reps)
                .noise(noise)
                .mitigate(spec.mitigate)
                .seed(derive_seed(spec.seed, &[index as u64]));
            Some(reconstruct(&branch_state(&cfg)?, &job)?)
        }
    };
    targets
        .iter()
        .map(|&t| {
            let est = report.as_ref().and_then(|r| r.estimate(t));
            Ok(Record {
                theta_rad: theta,
                scenario: spec.scenario,
                qwp: spec.qwp,
                target: t.to_string(),
                irreality_exact: irreality(&bob, &MeasureTarget::qubit(t))?,
                irreality_predicted: predicted,
                irreality_est: est.map(|e| e.mean),
                irreality_std: est.map(|e| e.std),
                shots: report.as_ref().map(|_| spec.shots),
                repetitions: report.as_ref().map(|_| spec.reps),
                mitigated: report.as_ref().map(|_| spec.mitigate),
                seed: report.as_ref().map(|_| spec.seed),
            })
        })
        .collect()
}

/// Rows ordered by θ, then target.
pub fn sweep(spec: &RunSpec) -> Result<Vec<Record>, CliError> {
    spec.validate()?;
    let per_point = spec
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(k, theta)| point_records(spec, k, theta))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

pub fn render(records: &[Record], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if records.is_empty() {
                w.write_record(CSV_HEADER)?;
            }
            for r in records {
                w.serialize(r)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(records)?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "theta_rad",
    "scenario",
    "qwp",
    "target",
    "irreality_exact",
    "irreality_predicted",
    "irreality_est",
    "irreality_std",
    "shots",
    "repetitions",
    "mitigated",
    "seed",
];

/// Runs the sweep and writes it to `spec.out`, or stdout when unset.
/// Returns the bytes written.
pub fn cmd_run(spec: &RunSpec) -> Result<Vec<u8>, CliError> {
    let bytes = render(&sweep(spec)?, spec.format)?;
    match &spec.out {
        Some(path) => fs::write(path, &bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(bytes)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Test hook: every gate named `.0` in the circuits of the stage checks is
/// swapped for `.1`.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub corrupt: Option<(String, Gate)>,
}

impl VerifyOptions {
    /// Replaces the beam splitter with a Hadamard.
    pub fn corrupted_beam_splitter() -> Self {
        Self {
            corrupt: Some(("BS".into(), StandardGate::H.gate())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark}  {:<width$}  {}", c.name, c.detail)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn verify_grid() -> Vec<f64> {
    RunSpec::default().grid()
}

fn edit_circuit(opts: &VerifyOptions) -> impl Fn(&mut Circuit) + '_ {
    move |circ: &mut Circuit| {
        if let Some((name, gate)) = &opts.corrupt {
            circ.replace_gate(name, gate)
                .expect("replacement gate has matching arity");
        }
    }
}

fn stage_checks(opts: &VerifyOptions) -> Result<Vec<Check>, CliError> {
    let edit = edit_circuit(opts);
    StageId::ALL
        .iter()
        .map(|&stage| {
            let mut worst = f64::INFINITY;
            for theta in verify_grid() {
                for qwp in [Qwp::In, Qwp::Out] {
                    let cfg = RqcConfig::new(theta)?.with_qwp(qwp);
                    let sim = stage_state_in(stage, &cfg, &edit)?;
                    worst = worst.min(sim.fidelity(&oracle_state(stage, &cfg)?)?);
                }
            }
            Ok(check(
                format!("stage {stage}"),
                worst >= 1.0 - 1e-12,
                format!("min fidelity {worst:.15}"),
            ))
        })
        .collect()
}

fn curve_checks() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for point in [InterventionPoint::Stage2, InterventionPoint::Stage5] {
        let (mut err_in, mut err_out) = (0.0f64, 0.0f64);
        for theta in verify_grid() {
            let h = binary_entropy((theta / 2.0).cos().powi(2))?;
            for (qwp, expect, err) in [(Qwp::In, h, &mut err_in), (Qwp::Out, 0.0, &mut err_out)] {
                let cfg = RqcConfig::new(theta)?.with_qwp(qwp).at(point);
                let rho = bob_state(&cfg)?;
                for t in cfg.report_targets() {
                    *err = err.max((irreality(&rho, &MeasureTarget::qubit(t))? - expect).abs());
                }
            }
        }
        out.push(check(
            format!("{point} irreality, qwp in"),
            err_in < 1e-9,
            format!("max error {err_in:.3e}"),
        ));
        out.push(check(
            format!("{point} irreality, qwp out"),
            err_out < 1e-12,
            format!("max error {err_out:.3e}"),
        ));
    }
    Ok(out)
}

fn reduction_check() -> Result<Check, CliError> {
    let mut worst = 0.0f64;
    for theta in [0.0, PI / 6.0, PI / 4.0, PI / 3.0, FRAC_PI_2] {
        for qwp in [Qwp::In, Qwp::Out] {
            for point in [InterventionPoint::Stage2, InterventionPoint::Stage5] {
                let cfg = RqcConfig::new(theta)?.with_qwp(qwp).at(point);
                let (reduced, bob) = (tomography_state(&cfg)?, bob_state(&cfg)?);
                for t in cfg.report_targets() {
                    let target = MeasureTarget::qubit(t);
                    worst = worst
                        .max((irreality(&reduced, &target)? - irreality(&bob, &target)?).abs());
                }
            }
        }
    }
    Ok(check(
        "subsystem reduction",
        worst < 1e-10,
        format!("max difference {worst:.3e}"),
    ))
}

fn measure_identity_check() -> Result<Check, CliError> {
    let mut worst = 0.0f64;
    let mut min_value = f64::INFINITY;
    for seed in 0..300u64 {
        let n = 2 + (seed % 3) as usize;
        let labels: Vec<String> = (0..n).map(|k| format!("q{k}")).collect();
        let rho = random_density(Register::new(&labels)?, 1 + (seed % 4) as usize, seed)?;
        let target = MeasureTarget::qubit(labels[(seed as usize / 3) % n].clone());
        let d = decompose(&rho, &target)?;
        worst = worst.max((d.irreality - d.coherence - d.discord).abs());
        min_value = min_value.min(d.irreality).min(d.discord);
        let once = dephase(&rho, &target)?;
        worst = worst.max(
            dephase(&once, &target)?
                .matrix()
                .max_abs_diff(once.matrix()),
        );
    }
    Ok(check(
        "irreality = coherence + discord",
        worst < 1e-10 && min_value >= -1e-10,
        format!("max residual {worst:.3e}, min value {min_value:.3e}"),
    ))
}

fn timing_check() -> Result<Check, CliError> {
    let mut worst = f64::INFINITY;
    for theta in verify_grid() {
        for qwp in [Qwp::In, Qwp::Out] {
            let cfg = RqcConfig::new(theta)?.with_qwp(qwp);
            let early = simulate(&build_rqc(&cfg.at(InterventionPoint::Stage2)))?;
            let late = simulate(&build_rqc(&cfg))?;
            worst = worst.min(early.final_state.fidelity(&late.final_state)?);
        }
    }
    Ok(check(
        "intervention timing",
        worst >= 1.0 - 1e-12,
        format!("min fidelity {worst:.15}"),
    ))
}

fn one_atom_check() -> Result<Check, CliError> {
    let mut worst = 0.0f64;
    let mut min_value = f64::INFINITY;
    for theta in verify_grid().into_iter().skip(1) {
        let cfg = RqcConfig::new(theta)?.with_qwp(Qwp::In).with_atoms(1)?;
        let c = atom_coherence(&cfg)?;
        min_value = min_value.min(c);
        worst = worst.max((c - predicted_irreality(&cfg)).abs());
    }
    Ok(check(
        "one-atom coherence",
        min_value > 0.0 && worst < 1e-9,
        format!("min {min_value:.6}, max error {worst:.3e}"),
    ))
}

pub fn cmd_verify(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let mut checks = stage_checks(opts)?;
    checks.extend(curve_checks()?);
    checks.push(reduction_check()?);
    checks.push(measure_identity_check()?);
    checks.push(timing_check()?);
    checks.push(one_atom_check()?);
    Ok(VerifyReport { checks })
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(name = "rqc", version, about = "Reality quantum correlator simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep θ and write one row per angle and target.
    Run(RunArgs),
    /// Check the circuit against closed forms and measure identities.
    Verify,
}

/// Flags override values from `--config`.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Flat JSON file with any RunSpec fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    #[arg(long, value_enum)]
    pub qwp: Option<QwpSetting>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_stop: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub atoms: Option<u8>,
    /// Shots per tomography setting.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Per-qubit readout flip probability.
    #[arg(long, allow_negative_numbers = true)]
    pub readout_p: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub mitigate: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunArgs {
    pub fn into_spec(self) -> Result<RunSpec, CliError> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Config {
                    path: path.clone(),
                    source,
                })?;
                serde_json::from_str(&text)?
            }
            None => RunSpec::default(),
        };
        macro_rules! merge {
            ($($field:ident <- $arg:ident),*) => {
                $(if let Some(v) = self.$arg { spec.$field = v; })*
            };
        }
        merge!(
            mode <- mode,
            scenario <- scenario,
            qwp <- qwp,
            theta_start <- theta_start,
            theta_stop <- theta_stop,
            steps <- steps,
            atoms <- atoms,
            shots <- shots,
            reps <- reps,
            readout_p <- readout_p,
            mitigate <- mitigate,
            seed <- seed,
            format <- format
        );
        if self.out.is_some() {
            spec.out = self.out;
        }
        Ok(spec)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => match args.into_spec().and_then(|spec| cmd_run(&spec)) {
            Ok(_) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Command::Verify => match cmd_verify(&VerifyOptions::default()) {
            Ok(report) => {
                println!("{report}");
                if report.all_passed() {
                    EXIT_OK
                } else {
                    EXIT_VERIFY_FAILED
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_VERIFY_FAILED
            }
        },
    }
}
