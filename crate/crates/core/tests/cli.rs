use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use robust_factor::linalg::{lambda_min, SymmetricMatrix};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-factor")).args(args).output().expect("spawn binary")
}

fn read_matrix(path: &Path) -> SymmetricMatrix {
    let rows: Vec<Vec<f64>> = fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    SymmetricMatrix::from_rows(&rows).unwrap()
}

fn summary(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_identity_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("eye.csv");
    fs::write(&input, "# covariance n=3\n1,0,0\n0,1,0\n0,0,1\n").unwrap();
    let out = dir.path().join("out");
    let res = run(&["solve", "--input", input.to_str().unwrap(), "--epsilon", "0.1", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let json = summary(&out.join("solution.json"));
    for key in ["distance", "epsilon", "objective", "iterations", "status", "recovery_residual", "bound_gap"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["distance"], "frobenius");
    assert_eq!(json["epsilon"], 0.1);

    let l = read_matrix(&out.join("L.csv"));
    let d = read_matrix(&out.join("D.csv"));
    read_matrix(&out.join("Sigma.csv"));
    assert!(lambda_min(&l).unwrap() > -1e-9);
    assert!(d.is_diagonal());
    assert!(d.diag().iter().all(|&v| v >= 0.0));
}

#[test]
fn solve_small_instance_reaches_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    fs::write(&input, "# covariance n=2\n2,1\n1,2\n").unwrap();
    let res = run(&["solve", "--input", input.to_str().unwrap(), "--epsilon", "1e-6", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success());
    let objective = summary(&dir.path().join("solution.json"))["objective"].as_f64().unwrap();
    assert!((objective - 2.0).abs() < 1e-2, "{objective}");
}

#[test]
fn solve_from_samples() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    fs::write(&input, "# samples n=2\n1,2\n-1,-1\n0.5,0\n").unwrap();
    let res = run(&["solve", "--input", input.to_str().unwrap(), "--distance", "gelbrich", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(summary(&dir.path().join("solution.json"))["distance"], "gelbrich");
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ragged.csv");
    fs::write(&input, "# covariance n=2\n1,0,0\n0,1\n").unwrap();
    let res = run(&["solve", "--input", input.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("ragged.csv"), "{err}");

    let res = run(&["solve", "--input", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("missing.csv"));

    let res = run(&["converge", "--n", "3", "--r", "3"]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["sweep", "--no-such-flag"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let res = run(&["converge", "--n", "3", "--r", "1", "--max-iters", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn single_iteration_trace_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["converge", "--n", "4", "--r", "1", "--max-iters", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success());
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "iter,objective,avg_objective,conv_error,dykstra_iters,time_ms");
    assert_eq!(lines.len(), 2);
    assert_eq!(summary(&dir.path().join("summary.json"))["iterations"], 1);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n": 5, "r": 2, "max_iters": 30, "distance": "kl", "epsilon": 0.3}"#).unwrap();
    let res = run(&["converge", "--config", cfg.to_str().unwrap(), "--max-iters", "12", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let json = summary(&dir.path().join("summary.json"));
    assert_eq!(json["iterations"], 12);
    assert_eq!(json["distance"], "kl");
    assert_eq!(json["epsilon"], 0.3);

    fs::write(&cfg, r#"{"n": 5, "bogus": 1}"#).unwrap();
    let res = run(&["converge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn timing_grid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&[
        "timing",
        "--n-grid",
        "4,6",
        "--r",
        "2",
        "--epsilons",
        "0.1,1",
        "--distances",
        "frobenius,gelbrich",
        "--max-iters",
        "200",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,epsilon,distance,iters,seconds,status");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1].starts_with("4,1e-1,frobenius,"));
    for line in &lines[1..] {
        let status = line.rsplit(',').next().unwrap();
        assert!(status == "converged" || status == "max_iters", "{line}");
    }
}

#[test]
fn identical_configs_give_identical_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        let common = ["--n", "6", "--r", "2", "--max-iters", "40", "--record-timing", "false", "--out", out];
        assert!(run(&[&["converge"][..], &common[..]].concat()).status.success());
        let sweep = ["--n-exp", "3", "--epsilons", "0.1,1,10", "--samples", "50"];
        assert!(run(&[&["sweep"][..], &common[..], &sweep[..]].concat()).status.success());
    }
    for name in ["trace.csv", "summary.json", "sweep.csv", "runs.csv", "sweep.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let sweep = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next().unwrap(), "epsilon,mean_err,p5_err,p95_err,improved_frac");
    assert_eq!(sweep.lines().count(), 4);
}
