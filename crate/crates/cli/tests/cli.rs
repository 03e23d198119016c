use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DELTA: &str = r#"{"alpha": -1, "beta": 2, "gamma": -1, "delta": 0, "theta": 3.141592653589793, "mass": 0.5}"#;
const TWO_LEVEL: &str = r#"{"alpha": -2, "beta": 3, "gamma": -2, "delta": 1, "theta": 0, "mass": 0.5}"#;
const DELTA_PRIME: &str =
    r#"{"alpha": -1, "beta": 0, "gamma": -1, "delta": 1, "theta": 3.141592653589793, "mass": 0.5}"#;

fn pointfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pointfam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ok_stdout(args: &[&str]) -> String {
    let out = pointfam(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&ok_stdout(args)).unwrap()
}

#[test]
fn bound_delta_has_single_state() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    let v = json(&["bound", "--params", s(&p)]);
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 1);
    assert!((states[0]["kappa"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!((states[0]["energy"].as_f64().unwrap() + 1.0).abs() < 1e-14);
}

#[test]
fn bound_two_level() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", TWO_LEVEL);
    let v = json(&["bound", "--params", s(&p)]);
    let energies: Vec<f64> = v["states"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["energy"].as_f64().unwrap())
        .collect();
    assert_eq!(energies.len(), 2);
    assert!((energies[0] + 9.0).abs() < 1e-12);
    assert!((energies[1] + 1.0).abs() < 1e-12);
}

#[test]
fn output_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", TWO_LEVEL);
    for args in [
        vec!["nbody", "--params", s(&p), "--n", "4"],
        vec!["scatter", "--params", s(&p), "--k-range", "0.1:3:0.1"],
        vec!["diffraction-scan", "--params", s(&p), "--samples", "2000"],
        vec![
            "phase-diagram",
            "--delta",
            "1",
            "--alpha",
            "-2:2:0.25",
            "--gamma",
            "-2:2:0.25",
        ],
    ] {
        let a = pointfam(&args);
        let b = pointfam(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", DELTA_PRIME);
    let args = ["diffraction-scan", "--params", s(&p), "--samples", "3000"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_pointfam"))
            .args(args)
            .env("POINTFAM_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn params_check_round_trips_its_own_output() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", TWO_LEVEL);
    let first = ok_stdout(&["params-check", "--params", s(&p)]);
    let q = write(&dir, "echo.json", &first);
    let second = ok_stdout(&["params-check", "--params", s(&q)]);
    assert_eq!(first, second);
}

#[test]
fn invalid_params_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"alpha": -2, "beta": 3.1, "gamma": -2, "delta": 1, "theta": 0, "mass": 0.5}"#,
    );
    let out = pointfam(&["bound", "--params", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.starts_with("bound: "), "{msg}");
    assert!(msg.contains("constraint"), "{msg}");

    let garbage = write(&dir, "garbage.json", "{not json");
    assert_eq!(
        pointfam(&["params-check", "--params", s(&garbage)]).status.code(),
        Some(1)
    );
    let mass = write(
        &dir,
        "m.json",
        r#"{"alpha": 1, "beta": 0, "gamma": 1, "delta": 0, "theta": 0, "mass": 0}"#,
    );
    assert_eq!(pointfam(&["bound", "--params", s(&mass)]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(pointfam(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(pointfam(&["bound", "--bogus"]).status.code(), Some(1));
    assert_eq!(pointfam(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(
        pointfam(&["phase-diagram", "--delta", "1", "--alpha", "0:1", "--gamma", "0:1:0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(pointfam(&["--help"]).status.code(), Some(0));
}

#[test]
fn scatter_csv_shape() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "delta.json", DELTA);
    let text = ok_stdout(&["scatter", "--params", s(&p), "--k-range", "0.5:2:0.5"]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,|T|^2,|R|^2,re(T+),im(T+),re(R+),im(R+),re(R-),im(R-)"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let unit = &rows[1];
    assert_eq!(unit[0], 1.0);
    assert!((unit[1] - 0.5).abs() < 1e-15);
    for r in &rows {
        assert_eq!(r.len(), 9);
        assert!((r[1] + r[2] - 1.0).abs() < 1e-14);
    }
}

#[test]
fn phase_diagram_shows_all_counts() {
    let text = ok_stdout(&[
        "phase-diagram",
        "--delta",
        "1",
        "--alpha",
        "-4:4:0.1",
        "--gamma",
        "-4:4:0.1",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "alpha,gamma,count");
    let counts: Vec<u32> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(counts.len(), 81 * 81);
    for c in 0..=2 {
        assert!(counts.contains(&c), "count {c} missing");
    }
}

#[test]
fn nbody_states_and_eval() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", TWO_LEVEL);
    let v = json(&["nbody", "--params", s(&p), "--n", "3"]);
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    assert_eq!(states[0]["symmetry"], "symmetric");
    assert_eq!(states[1]["symmetry"], "antisymmetric");
    assert!((states[0]["energy"].as_f64().unwrap() + 36.0).abs() < 1e-10);

    let pts = write(&dir, "pts.csv", "x1,x2,x3\n0.3,0.0,-0.2\n-0.2,0.0,0.3\n");
    let text = ok_stdout(&[
        "nbody-eval",
        "--params",
        s(&p),
        "--n",
        "3",
        "--state-index",
        "1",
        "--points",
        s(&pts),
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,re(psi),im(psi)");
    let vals: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    // reversing the ordering is an odd permutation for three particles
    assert!((vals[0] + vals[1]).abs() < 1e-14 && vals[0].abs() > 1e-3);

    let on_line = write(&dir, "on.csv", "0.1,0.1,-0.2\n");
    let out = pointfam(&["nbody-eval", "--params", s(&p), "--n", "3", "--points", s(&on_line)]);
    assert_eq!(out.status.code(), Some(1));
    let short = write(&dir, "short.csv", "0.1,0.2\n");
    assert_eq!(
        pointfam(&["nbody-eval", "--params", s(&p), "--n", "3", "--points", s(&short)])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pointfam(&[
            "nbody-eval",
            "--params",
            s(&p),
            "--n",
            "3",
            "--state-index",
            "7",
            "--points",
            s(&pts)
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn diffraction_verdicts() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "d.json", DELTA);
    let dp = write(&dir, "dp.json", DELTA_PRIME);
    let a = json(&["diffraction-scan", "--params", s(&d), "--samples", "2000"]);
    assert_eq!(a["verdict"], true);
    assert!(a["max_residual"].as_f64().unwrap() <= 1e-10);
    let b = json(&["diffraction-scan", "--params", s(&dp), "--samples", "2000"]);
    assert_eq!(b["verdict"], false);
    let r = json(&["diffraction", "--params", s(&d), "--k", "1.0", "--phi", "0.5"]);
    assert!(r["residual_norm"].as_f64().unwrap() < 1e-14);
    assert_eq!(
        pointfam(&["diffraction", "--params", s(&d), "--k", "1", "--phi", "0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn mcguire_agrees_with_closed_form() {
    let v = json(&["mcguire", "--g0", "-1.4142135623730951", "--mass", "1", "--n", "3"]);
    assert!((v["energy"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert!(v["relative_difference"].as_f64().unwrap() < 1e-12);
    assert_eq!(pointfam(&["mcguire", "--g0", "0.5", "--n", "3"]).status.code(), Some(1));
}

#[test]
fn verify_single_suite_passes() {
    let out = pointfam(&["verify", "--suite", "scatter"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("scatter/unitarity"));
}
