use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chua-relay")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_reports() {
    let out = run(&["spectrum", "--alpha", "5", "--beta", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["lambda_star"].as_f64().unwrap() + 5.8734).abs() < 1e-4);
    assert_eq!(v["geometry_class"], "Contracting");
    assert_eq!(v["in_theorem_region"], true);

    let v = json(&run(&["spectrum", "--alpha", "0.25", "--beta", "5"]));
    assert_eq!(v["geometry_class"], "StrictSubdomain");
    assert_eq!(v["in_theorem_region"], false);

    let v = json(&run(&["spectrum", "--alpha", "0.125", "--beta", "0.421875"]));
    assert_eq!(v["triple_root"], true);

    assert_eq!(run(&["spectrum", "--alpha", "-1", "--beta", "5"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--alpha", "1"]).status.code(), Some(2));
}

#[test]
fn simulate_cycle_regime() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig3.csv");
    let out = run(&[
        "simulate",
        "--alpha",
        "5",
        "--beta",
        "5",
        "--x0",
        "10,10,1e-9",
        "--t-max",
        "500",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["t", "x1", "x2", "x3", "region"]);
    let times: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*times.last().unwrap(), 500.0);

    let events: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig3.events.json")).unwrap()).unwrap();
    let events = events["events"].as_array().unwrap();
    let crossings: Vec<&Value> = events.iter().filter(|e| e["kind"].get("Crossing").is_some()).collect();
    assert!(crossings.len() > 200);
    // late crossings repeat with bounded amplitude
    for e in &crossings[crossings.len() - 20..] {
        let x2 = e["state"]["x2"].as_f64().unwrap().abs();
        assert!((x2 - 2.7101576).abs() < 1e-4, "{x2}");
    }
}

#[test]
fn simulate_capture_regime() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig4.csv");
    let out = run(&[
        "simulate",
        "--alpha",
        "0.25",
        "--beta",
        "5",
        "--x0",
        "10,10,1e-9",
        "--method",
        "rk4",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (_, rows) = read_csv(&csv);
    let last = rows.last().unwrap();
    let x = [num(&last[1]), num(&last[2]), num(&last[3])];
    let d = ((x[0].abs() - 1.0).powi(2) + x[1].powi(2) + (x[2].abs() - 1.0).powi(2)).sqrt();
    assert!(d < 1e-6 && x[0] * x[2] < 0.0);
}

#[test]
fn simulate_usage_errors() {
    assert_eq!(
        run(&["simulate", "--alpha", "5", "--beta", "5", "--x0", "10,10,1e-9", "--t-max", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["simulate", "--alpha", "5", "--beta", "5", "--x0", "10,x,1"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--alpha", "5", "--beta", "5", "--x0", "0,0.5,0"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--alpha", "5", "--beta", "5", "--x0", "1,1,1", "--method", "euler"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(&[
            "simulate",
            "--alpha",
            "5",
            "--beta",
            "5",
            "--x0",
            "3,-2,0.5",
            "--t-max",
            "20",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.events.json")).unwrap(),
        std::fs::read(dir.path().join("b.events.json")).unwrap()
    );
    let (_, rows) = read_csv(&a);
    for r in &rows {
        for field in &r[..4] {
            let v = num(field);
            assert_eq!(format!("{v:.16e}"), *field);
        }
    }
}

#[test]
fn cycle_command() {
    let out = run(&["cycle", "--alpha", "5", "--beta", "5", "--seed", "10,10", "--tol", "1e-9", "--max-iter", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["converged"], true);
    assert!(v["contraction"].as_f64().unwrap() < 1.0);

    let out = run(&["cycle", "--alpha", "0.25", "--beta", "5", "--seed", "10,10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["failure"].as_str().unwrap().contains("no return"));

    assert_eq!(run(&["cycle", "--alpha", "5", "--beta", "5", "--seed", "0.5,0.5"]).status.code(), Some(2));
}

#[test]
fn scan_command() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = run(&["scan", "--alpha-range", "0.05:1:20", "--beta-range", "0.1:2:20", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["alpha", "beta", "routh", "single_root", "geometry", "theorem", "lambda_star"]);
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().any(|r| r[5] == "true") && rows.iter().any(|r| r[5] == "false"));
    assert_eq!(num(&rows[1][0]), 0.05);

    let out = run(&["scan", "--alpha-range", "5:5:1", "--beta-range", "5:5:1", "--cycles"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].ends_with(",cycle"));
    assert!(lines[1].contains(",true,") && lines[1].ends_with(",true"));

    let out = run(&["scan", "--alpha-range", "0.25:5:2", "--beta-range", "5:5:1", "--cycles"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let last = line.rsplit(',').next().unwrap();
        assert!(["true", "false", "inconclusive"].contains(&last));
    }

    assert_eq!(run(&["scan", "--alpha-range", "1:0.5:3", "--beta-range", "1:2:3"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--alpha-range", "1:2", "--beta-range", "1:2:3"]).status.code(), Some(2));
}

#[test]
fn regularized_equilibrium_reports() {
    let v = json(&run(&[
        "regularized",
        "--alpha",
        "5",
        "--beta",
        "5",
        "--eps",
        "1e-3",
        "--equilibrium",
        "--kind",
        "cubic",
    ]));
    assert_eq!(v["linearization"]["is_saddle"], true);
    assert_eq!(v["state"]["x3"], 0.0);
    let v = json(&run(&["regularized", "--alpha", "5", "--beta", "5", "--equilibrium", "--kind", "unit-slope"]));
    assert_eq!(v["normal_form"]["hyperbolic"], false);
    assert_eq!(
        run(&["regularized", "--alpha", "5", "--beta", "5", "--eps", "0.05", "--eps0", "0.05"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["regularized", "--alpha", "5", "--beta", "5", "--kind", "tanh", "--equilibrium"]).status.code(),
        Some(2)
    );
}

#[test]
fn regularized_run_tracks_relay_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("band.csv");
    let out = run(&[
        "regularized",
        "--alpha",
        "5",
        "--beta",
        "5",
        "--eps",
        "1e-3",
        "--t-max",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&csv);
    assert_eq!(header.last().unwrap(), "layer");
    assert_eq!(num(&rows.last().unwrap()[0]), 2.0);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("band.events.json")).unwrap()).unwrap();
    assert_eq!(report["band_cycle"]["converged"], true);
    assert!(report["distance"].as_f64().unwrap() < 0.05);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# experiment\nalpha = 0.25\nbeta = 5\n").unwrap();
    let v = json(&run(&["--config", cfg.to_str().unwrap(), "spectrum"]));
    assert_eq!(v["params"]["alpha"], 0.25);
    let v = json(&run(&["spectrum", "--config", cfg.to_str().unwrap(), "--alpha", "5"]));
    assert_eq!(v["params"]["alpha"], 5.0);
    assert_eq!(v["in_theorem_region"], true);
    std::fs::write(&cfg, "alpha 5\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "spectrum"]).status.code(), Some(2));
}
