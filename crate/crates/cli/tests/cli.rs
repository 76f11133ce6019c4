use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kdebw_cli::{ExperimentDocument, ExperimentReport};

fn kdebw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdebw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let o = kdebw(&["sample", "gauss1d", "--np", "1000", "--seed", "42", "--out", path(p)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.iter().any(|l| l.contains("generator: gauss1d")));
    assert!(header.iter().any(|l| l.contains("seed: 42")));
    assert!(header.iter().any(|l| l.contains("ChaCha20")));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r.split_whitespace().count() == 1));
}

#[test]
fn hernquist_sample_respects_window() {
    let o = kdebw(&["sample", "hernquist", "--np", "1e5", "--seed", "7", "--rc", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("rc=1 mt=1 rmin=0.05 rmax=1000"));
    let radii: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(radii.len(), 100_000);
    assert!(radii.iter().all(|&r| (0.05..=1000.0).contains(&r)));
}

#[test]
fn select_reports_gaussian_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("g.txt");
    let trace = dir.path().join("trace.json");
    assert_eq!(code(&kdebw(&["sample", "gauss1d", "--np", "1e5", "--seed", "5", "--out", path(&sample)])), 0);
    let o = kdebw(&["select", path(&sample), "--kernel", "TSC", "--dim", "1", "--trace", path(&trace)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let value: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(value.as_object().unwrap().len(), 12);
    let report: ExperimentReport = serde_json::from_value(value).unwrap();
    assert_eq!(report.np, 100_000);
    assert_eq!(report.seed, 0);
    assert!(report.converged);
    assert!(report.analytic_h.is_none() && report.relative_error.is_none());
    assert!((report.selected_h / 0.21078 - 1.0).abs() <= 0.05, "{}", report.selected_h);

    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    let iters = t["iterations"].as_array().unwrap();
    assert_eq!(iters.len(), report.iterations + report.backoffs);
    assert_eq!(t["final_h"].as_f64().unwrap(), report.selected_h);
}

#[test]
fn select_input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing here\n").unwrap();
    let o = kdebw(&["select", path(&empty)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("no data rows"));

    let three = dir.path().join("three.txt");
    fs::write(&three, "1 2 3\n4 5 6\n").unwrap();
    let o = kdebw(&["select", path(&three), "--dim", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("dimension mismatch"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0.1\n0.2\n0.3x\n").unwrap();
    let o = kdebw(&["select", path(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"));

    let o = kdebw(&["select", path(&dir.path().join("missing.txt"))]);
    assert_eq!(code(&o), 1);

    let same = dir.path().join("same.txt");
    fs::write(&same, "2\n2\n2\n").unwrap();
    assert_eq!(code(&kdebw(&["select", path(&same)])), 1);
}

#[test]
fn non_convergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("t.txt");
    assert_eq!(code(&kdebw(&["sample", "trimodal", "--np", "1e4", "--out", path(&sample)])), 0);
    let o = kdebw(&["select", path(&sample), "--max-iters", "1", "--tol", "1e-9"]);
    assert_eq!(code(&o), 2);
    let report: ExperimentReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report.converged);
}

#[test]
fn three_column_select() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("g3.txt");
    assert_eq!(code(&kdebw(&["sample", "gauss3d", "--np", "1e4", "--out", path(&sample)])), 0);
    let o = kdebw(&["select", path(&sample), "--dim", "3", "--kernel", "cic"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: ExperimentReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.kernel, "cic");
    assert!(r.selected_h > 0.0);
    assert_eq!(code(&kdebw(&["select", path(&sample), "--dim", "2"])), 1);
}

#[test]
fn experiment_output_is_sorted_and_deterministic() {
    let args = [
        "experiment", "tscdens1d", "--kernel", "cic", "--np", "5000,1000", "--seed", "3,1",
        "--no-timings",
    ];
    let a = kdebw(&args);
    let b = kdebw(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let doc: ExperimentDocument = serde_json::from_slice(&a.stdout).unwrap();
    let keys: Vec<(usize, u64)> = doc.reports.iter().map(|r| (r.np, r.seed)).collect();
    assert_eq!(keys, [(1000, 1), (1000, 3), (5000, 1), (5000, 3)]);
    assert_eq!(doc.aggregates.len(), 2);
    assert!(doc.external_reference.is_none());
    for r in &doc.reports {
        let rel = (r.selected_h - r.analytic_h.unwrap()) / r.analytic_h.unwrap();
        assert!((rel - r.relative_error.unwrap()).abs() < 1e-15);
        assert_eq!(r.wall_time_ms, 0);
    }
}

#[test]
fn experiment_curves_and_reference() {
    let dir = tempfile::tempdir().unwrap();
    let curves = dir.path().join("curves");
    let o = kdebw(&[
        "experiment", "hernquist", "--np", "2000", "--seed", "4", "--emit-curves", path(&curves),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: ExperimentDocument = serde_json::from_slice(&o.stdout).unwrap();
    let ext = doc.external_reference.unwrap();
    assert_eq!((ext.analytic_h, ext.selected_h, ext.relative_error), (0.1712, 0.1678, -0.019));
    let table = fs::read_to_string(curves.join("hernquist_tsc_np2000_seed4.dat")).unwrap();
    assert!(table.lines().any(|l| l == "# r f_hat f rho_hat rho"));
    let first = table.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(first.split_whitespace().count(), 5);
}

#[test]
fn experiment_rejects_unknown_name() {
    let o = kdebw(&["experiment", "gauss2d"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&kdebw(&["sample", "nope", "--np", "10"])), 1);
    assert_eq!(code(&kdebw(&["experiment", "gauss1d", "--kernel", "gaussian"])), 1);
}

#[test]
fn auto_density_tracks_gaussian() {
    let o = kdebw(&["density", "--generator", "gauss1d", "--np", "1e5", "--kernel", "tsc", "--auto"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut worst = 0.0f64;
    let mut rows = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let v: Vec<f64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
        worst = worst.max((v[1] - v[2]).abs());
        rows += 1;
    }
    assert!(rows > 900);
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn density_from_file_and_bad_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("s.txt");
    fs::write(&sample, "0\n0.5\n1\n").unwrap();
    let o = kdebw(&["density", "--input", path(&sample), "--h", "0.5", "--range", "-1,2", "--step", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.ends_with(" NA")));

    assert_eq!(code(&kdebw(&["density", "--input", path(&sample), "--h", "0"])), 1);
    assert_eq!(code(&kdebw(&["density", "--generator", "gauss1d", "--h", "-1"])), 1);
    assert_eq!(code(&kdebw(&["density", "--generator", "gauss1d"])), 1);
}

#[test]
fn help_and_usage_codes() {
    assert_eq!(code(&kdebw(&["--help"])), 0);
    assert_eq!(code(&kdebw(&["--version"])), 0);
    assert_eq!(code(&kdebw(&[])), 1);
    assert_eq!(code(&kdebw(&["select", "x.txt", "--bogus"])), 1);
}
