use std::fs;
use std::process::Command;

use rqc_cli::{cmd_run, Format, Mode, QwpSetting, RunSpec, Scenario, CSV_HEADER};

fn rqc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rqc"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exact_sweep_writes_one_row_per_angle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3a.csv");
    let o = rqc(&[
        "run",
        "--scenario",
        "stage2",
        "--qwp",
        "in",
        "--steps",
        "33",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        CSV_HEADER
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 33);
    for r in &rows {
        let theta: f64 = r[0].parse().unwrap();
        let c2 = (theta / 2.0).cos().powi(2);
        let h = if c2 >= 1.0 {
            0.0
        } else {
            -c2 * c2.log2() - (1.0 - c2) * (1.0 - c2).log2()
        };
        assert!((r[4].parse::<f64>().unwrap() - h).abs() < 1e-9);
        assert_eq!(&r[6], "");
    }
}

#[test]
fn stage5_real_scenario_is_all_zero() {
    let o = rqc(&[
        "run",
        "--scenario",
        "stage5",
        "--qwp",
        "out",
        "--steps",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows
        .iter()
        .all(|r| r[4].parse::<f64>().unwrap().abs() < 1e-12));
}

#[test]
fn tomography_row_near_one_with_spread() {
    let spec = RunSpec {
        mode: Mode::Tomography,
        theta_start: std::f64::consts::FRAC_PI_2,
        theta_stop: std::f64::consts::FRAC_PI_2,
        steps: 1,
        format: Format::Json,
        out: Some(
            tempfile::tempdir()
                .unwrap()
                .path()
                .join("missing-dir")
                .join("x.json"),
        ),
        ..RunSpec::default()
    };
    // unwritable path surfaces as an error
    assert!(cmd_run(&spec).is_err());
    let dir = tempfile::tempdir().unwrap();
    let spec = RunSpec {
        out: Some(dir.path().join("t.json")),
        ..spec
    };
    cmd_run(&spec).unwrap();
    let rows: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    let row = &rows[0];
    assert!((row["irreality_est"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert!(row["irreality_std"].as_f64().unwrap() > 0.0);
    assert_eq!(row["repetitions"], 10);
    assert_eq!(row["mitigated"], false);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    fs::write(
        &cfg,
        r#"{"scenario": "stage5", "qwp": "out", "steps": 4, "format": "json"}"#,
    )
    .unwrap();
    let o = rqc(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--qwp",
        "in",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    assert!(text.lines().nth(1).unwrap().contains(",stage5,in,e1,"));
}

#[test]
fn invalid_specs_exit_with_one() {
    for args in [
        &["run", "--steps", "0"][..],
        &["run", "--theta-stop", "3.2"],
        &["run", "--atoms", "3"],
        &["run", "--mode", "fast"],
        &["run", "--config", "/nonexistent/spec.json"],
        &["frobnicate"],
    ] {
        let o = rqc(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn verify_exits_zero() {
    let o = rqc(&["verify"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS  stage psi5_branch"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn same_spec_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let base = RunSpec {
        mode: Mode::Tomography,
        scenario: Scenario::Stage5,
        qwp: QwpSetting::In,
        steps: 3,
        shots: 256,
        reps: 3,
        readout_p: 0.02,
        mitigate: true,
        ..RunSpec::default()
    };
    let a = cmd_run(&RunSpec {
        out: Some(dir.path().join("a.csv")),
        ..base.clone()
    })
    .unwrap();
    let b = cmd_run(&RunSpec {
        out: Some(dir.path().join("b.csv")),
        ..base.clone()
    })
    .unwrap();
    assert_eq!(a, b);
    let c = cmd_run(&RunSpec {
        out: Some(dir.path().join("c.csv")),
        seed: 1,
        ..base
    })
    .unwrap();
    assert_ne!(a, c);
}

#[test]
fn mitigate_flag_without_value() {
    let o = rqc(&[
        "run",
        "--mode",
        "tomography",
        "--steps",
        "1",
        "--shots",
        "64",
        "--reps",
        "2",
        "--mitigate",
        "--readout-p",
        "0.01",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",64,2,true,"));
}
