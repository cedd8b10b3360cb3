//! Runs the `regen` binary: exit codes, files written, and thread-count
//! independence of the output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use regen_experiments::{ExperimentError, Output, Table};

fn regen(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_regen"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    files
}

/// Small but non-trivial settings so every parallel path is exercised.
const QUICK: &[&str] = &[
    "-s", "replications=64",
    "-s", "n_values=10,100",
    "-s", "tau2_run_tours=5000",
    "-s", "tours=3000",
    "-s", "lorden_n=10,50",
];

#[test]
fn plan_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = regen(dir.path(), &["plan", "--model", "twostate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let plan = fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    assert!(plan.starts_with("model,"));
    let meta = fs::read_to_string(dir.path().join("plan.meta.txt")).unwrap();
    assert!(meta.contains("command = plan\n"));
    assert!(meta.contains("master_seed = 2010\n"));
    assert!(meta.contains("model = twostate\n"));
    assert!(dir.path().join("cost_comparison.csv").exists());
}

#[test]
fn sweep_writes_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = regen(dir.path(), &["sweep", "--t", "50"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let script = fs::read_to_string(dir.path().join("sweep.gp")).unwrap();
    assert!(script.contains("'sweep.csv'"));
    assert!(dir.path().join("sweep_argmin.csv").exists());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["plan", "-s", "no_such_key=1"][..],
        &["plan", "--alpha", "1.5"],
        &["plan", "--beta", "zero"],
        &["plan", "--threads", "0"],
        &["plan", "--model", "twostate", "--source", "drift-theorem"],
        &["plan", "--config", "/nonexistent/regen.cfg"],
    ] {
        let out = regen(dir.path(), args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn invalid_models_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // Below the drift threshold, and too few degrees of freedom.
    for args in [&["plan", "--a", "0.5"][..], &["table2", "--t", "3"]] {
        let out = regen(dir.path(), args);
        assert_eq!(code(&out), 3, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(csv_files(dir.path()).is_empty(), "nothing is written on failure");
}

#[test]
fn violations_map_to_exit_4() {
    // No valid configuration produces a violation, so the mapping is checked
    // on the library types the binary uses.
    let mut out = Output::default();
    assert!(out.check().is_ok());
    out.violations.push("mse 1 exceeds bound 0.5".to_string());
    let err = out.check().unwrap_err();
    assert!(matches!(err, ExperimentError::BoundViolation(_)));
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn single_replication_gives_na_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = regen(
        dir.path(),
        &["table1", "-s", "replications=1", "-s", "n_values=10", "-s", "a_values=5", "-s", "tau2_run_tours=2000"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let t = Table::from_csv(&fs::read_to_string(dir.path().join("table1.csv")).unwrap()).unwrap();
    assert!(t.real(0, "mc_stderr_mse").unwrap().is_nan());
    assert!(t.real(0, "mse_empirical").unwrap().is_finite());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# quick plan\nmodel = twostate\nbeta = 0.25\nepsilon = 0.2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = regen(&out_dir, &["plan", "--config", cfg.to_str().unwrap(), "--epsilon", "0.1", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta = fs::read_to_string(out_dir.join("plan.meta.txt")).unwrap();
    assert!(meta.contains("beta = 0.25\n"), "{meta}");
    assert!(meta.contains("epsilon = 0.1\n"), "{meta}");
    assert!(meta.contains("master_seed = 7\n"), "{meta}");
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = regen(&dir.path().join("out"), &["plan", "--dry-run"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Plan"));
    assert!(!dir.path().join("out").exists());
}

/// Runs `args` with 1 and 4 threads and compares every written file.
fn assert_thread_independent(args: &[&str]) {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&one, "1"), (&four, "4")] {
        let mut full = args.to_vec();
        full.extend_from_slice(QUICK);
        full.extend_from_slice(&["--threads", threads]);
        let out = regen(dir.path(), &full);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let names: Vec<_> = fs::read_dir(one.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(!names.is_empty());
    for name in names {
        let a = fs::read(one.path().join(&name)).unwrap();
        let b = fs::read(four.path().join(&name)).unwrap();
        assert!(a == b, "{args:?}: {name:?} differs between 1 and 4 threads");
    }
}

#[test]
fn table1_is_thread_independent() {
    assert_thread_independent(&["table1"]);
}

#[test]
fn estimate_is_thread_independent() {
    assert_thread_independent(&["estimate", "--model", "gibbs", "--meta-runs", "16", "--epsilon", "0.5"]);
    assert_thread_independent(&["estimate", "--model", "twostate", "--meta-runs", "16"]);
}

#[test]
fn tau2_and_twostate_check_are_thread_independent() {
    assert_thread_independent(&["tau2"]);
    assert_thread_independent(&["twostate-check"]);
}

#[test]
fn emitted_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["table2"][..], &["sweep"], &["twostate-check", "-s", "tours=2000"], &["plan", "--model", "twostate"]] {
        let out = regen(dir.path(), args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let files = csv_files(dir.path());
    assert!(files.len() >= 5);
    for path in files {
        let text = fs::read_to_string(&path).unwrap();
        let again = Table::from_csv(&text).unwrap().to_csv();
        assert_eq!(text, again, "{}", path.display());
    }
}
