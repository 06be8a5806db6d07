use std::process::{Command, Output};

use hermite_rms::bound::BoundBreakdown;
use hermite_rms_cli::format::to_json;
use hermite_rms_cli::{BoundOutput, ReproduceOutput, REPRODUCE_COLUMNS, SWEEP_COLUMNS};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermite-rms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SMALL_BOUND: [&str; 7] = ["bound", "--mixture", "[[1,1,0]]", "--K", "4", "--T", "2"];

#[test]
fn odd_order_is_a_config_error() {
    let o = run(&["bound", "--preset", "trimodal", "--K", "3", "--T", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("K must be even"));
    let o = run(&["approx", "--K", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_inputs_are_config_errors() {
    for args in [
        &["bound", "--mixture", "[[1,0,0]]", "--K", "4"][..],
        &["bound", "--mixture", "not json", "--K", "4"],
        &["bound", "--K", "4", "--T", "-1"],
        &["bound", "--K", "0"],
        &["sweep", "--T", "2"],
        &["sweep", "--K", ""],
        &["sweep", "--K", "4,5"],
        &["verify", "--suite", "nope"],
        &["reproduce", "--tolerance", "0"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn small_bound_is_finite_and_positive() {
    let o = run(&SMALL_BOUND);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out: BoundOutput = serde_json::from_str(&stdout(&o)).unwrap();
    let b = &out.breakdown;
    assert!(b.total.is_finite() && b.total > 0.0);
    assert!(b.term_tail_t >= 0.0 && b.term_tail_omega >= 0.0 && b.term_f_n >= 0.0 && b.term_sansone >= 0.0);
    assert_eq!(out.suspects.len(), 4);
    assert!(stderr(&o).contains("evaluated as written"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [&SMALL_BOUND[..], &["approx", "--preset", "normal", "--K", "10", "--T", "2", "--format", "csv"]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn bound_json_round_trips() {
    let text = stdout(&run(&SMALL_BOUND));
    let parsed: BoundOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&parsed), text);

    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let breakdown_text = serde_json::to_string_pretty(&value["breakdown"]).unwrap() + "\n";
    let breakdown: BoundBreakdown = serde_json::from_str(&breakdown_text).unwrap();
    assert_eq!(to_json(&breakdown), breakdown_text);
}

#[test]
fn override_of_the_band_edge_is_used() {
    let mut args = SMALL_BOUND.to_vec();
    args.extend(["--N", "5"]);
    let out: BoundOutput = serde_json::from_str(&stdout(&run(&args))).unwrap();
    assert_eq!(out.breakdown.band, 5.0);
    assert_eq!(out.ledger.band, 5.0);
}

#[test]
fn direct_norms_need_force_above_the_budget() {
    let o = run(&["bound", "--preset", "normal", "--K", "102", "--T", "2", "--direct"]);
    assert_eq!(o.status.code(), Some(2));
    let mut args = SMALL_BOUND.to_vec();
    args.push("--direct");
    let out: BoundOutput = serde_json::from_str(&stdout(&run(&args))).unwrap();
    let direct: f64 = out.direct_sansone.unwrap().iter().sum();
    assert!(direct <= out.breakdown.sansone_upper);
}

#[test]
fn strict_reproduction_fails_cleanly() {
    let o = run(&["reproduce", "--tolerance", "0.001", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), REPRODUCE_COLUMNS.join(","));
    assert_eq!(lines.count(), 6);
    assert!(stderr(&o).contains("FAIL term_sansone"));
}

#[test]
fn reproduction_reports_every_row() {
    let o = run(&["reproduce"]);
    let out: ReproduceOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out.rows.len(), 6);
    assert_eq!(o.status.code(), Some(if out.passed { 0 } else { 1 }));
    assert_eq!(format!("{:.4}", out.band), "31.6544");
}

#[test]
fn sweep_writes_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--preset",
        "trimodal",
        "--K",
        "4,8,16",
        "--T",
        "3",
        "--grid-points",
        "401",
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_COLUMNS);
    let rows: Vec<Vec<f64>> = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!(row[2] <= row[8], "measured rms above bound: {row:?}");
    }
    let plot = std::fs::read_to_string(dir.path().join("sweep.plot.txt")).unwrap();
    assert!(plot.starts_with("# measured_rms vs K\n4 "));
    assert_eq!(plot.matches("# ").count(), 7);
}

#[test]
fn verify_runs_a_single_suite() {
    let o = run(&["verify", "--suite", "cd-kernel", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.starts_with("cd-kernel,")));
    assert_eq!(text.lines().count(), 12);
}
