//! End-to-end behavior of the `dznd` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dznd(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dznd"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

#[test]
fn run_writes_one_row_per_step_plus_initial_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = dznd(
        &[
            "run",
            "--problem",
            "example2",
            "--model",
            "dznd1-2i",
            "--gamma",
            "10",
            "--epsilon",
            "0.001",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 10_001);
    assert!(lines[0].starts_with("step,tau,equation_residual,solution_error,x_re_1_1,"));
    assert_eq!(lines[0].split(',').count(), 4 + 8);
    assert!(lines[1].starts_with("0,0e0,"));
    assert!(lines[10_001].starts_with("10000,"));

    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    for key in [
        "outcome: COMPLETED",
        "k: 10000",
        "epsilon: 0.001",
        "gamma: 10",
        "seed: 42",
        "final_equation_residual",
        "predicted |1 - eps*gamma|",
    ] {
        assert!(summary.contains(key), "missing {key}");
    }
    let svg = fs::read_to_string(dir.path().join("residual.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn divergent_run_exits_nonzero_and_flags_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = dznd(
        &[
            "run",
            "--problem",
            "example2",
            "--model",
            "dznd1-2i",
            "--gamma",
            "10+20i",
            "--epsilon",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("outcome: DIVERGED"));
    assert!(summary.contains("predicts divergence"));
    assert!(summary.contains("matches prediction"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "--epsilon", "0.3", "--duration", "10"],
        vec!["run", "--epsilon", "0.1", "--problem", "example7"],
        vec!["run", "--epsilon", "0.1", "--model", "dznd3"],
        vec!["run", "--epsilon", "0.1", "--gamma", "ten"],
        vec![
            "run",
            "--epsilon",
            "0.1",
            "--model",
            "dznd2-2i",
            "--gamma",
            "10+20i",
        ],
    ] {
        let o = dznd(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!dir.path().join("trajectory.csv").exists());
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = dznd(&["run", "--epsilon", "0.1"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "--model",
        "dznd2-2i",
        "--gamma",
        "10",
        "--epsilon",
        "0.01",
        "--seed",
        "9",
    ];
    dznd(&args, a.path());
    dznd(&args, b.path());
    for f in ["trajectory.csv", "summary.txt", "residual.svg"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn single_point_sweep_has_one_row_and_no_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = dznd(
        &[
            "sweep",
            "--model",
            "dznd1-2i",
            "--gamma",
            "10",
            "--epsilon",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let report = fs::read_to_string(dir.path().join("order_report.txt")).unwrap();
    let row = report.lines().find(|l| l.starts_with("dznd1-2i")).unwrap();
    assert!(row.trim_end().ends_with('-'), "{row}");
}

#[test]
fn sweep_records_divergent_and_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = dznd(
        &[
            "sweep",
            "--model",
            "dznd1-2i",
            "--model",
            "dznd2-2i",
            "--gamma",
            "10+20i",
            "--gamma",
            "10-20i",
            "--epsilon",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .filter(|r| r.starts_with("dznd1-2i"))
        .all(|r| r.contains("DIVERGED")));
    assert!(rows
        .iter()
        .filter(|r| r.starts_with("dznd2-2i"))
        .all(|r| r.contains("FAILED")));
}

#[test]
fn sweep_is_deterministic_and_sorted() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--model",
        "dznd2-2i",
        "--model",
        "dznd1-2i",
        "--gamma",
        "10",
        "--epsilon",
        "0.1",
        "--epsilon",
        "0.01",
    ];
    dznd(&args, a.path());
    dznd(&args, b.path());
    let csv = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.path().join("sweep.csv")).unwrap());
    let keys: Vec<(String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[2].to_string())
        })
        .collect();
    assert_eq!(
        keys,
        [
            ("dznd1-2i", "1e-2"),
            ("dznd1-2i", "1e-1"),
            ("dznd2-2i", "1e-2"),
            ("dznd2-2i", "1e-1")
        ]
        .map(|(m, e)| (m.to_string(), e.to_string()))
    );
}

#[test]
fn verify_passes_and_prints_groups() {
    let dir = tempfile::tempdir().unwrap();
    let o = dznd(&["verify"], dir.path());
    // `verify` takes no --out flag
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_dznd"))
        .arg("verify")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.matches("[PASS]").count(), 6);
    assert!(text.contains("roots {1}"));
    assert!(text.lines().any(|l| l.trim_start().starts_with("10+20i")
        && l.contains("0.1")
        && l.contains("2.000000")));
}
