//! End-to-end tests of the ringconc binary: record contents, cache
//! behavior, figure files, formats, and exit codes.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static STAMP: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "ringconc-test-{}-{label}-{}",
        std::process::id(),
        STAMP.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], cache_dir: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringconc"))
        .args(args)
        .env("RINGCONC_CACHE_DIR", cache_dir)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str], cache_dir: &PathBuf) -> Value {
    let out = run(args, cache_dir);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn exact_reproduces_the_eight_three_value() {
    let cache = scratch_dir("exact83");
    let record = run_json(&["exact", "--n", "8", "--p", "3"], &cache);
    assert_eq!(record["method"], "exact");
    let c = record["c"].as_f64().unwrap();
    assert!((c - 0.431).abs() < 1e-3, "C = {c}");
    assert!(record["s_opt"].as_f64().is_some());
}

#[test]
fn ow_and_lagrange_agree_with_closed_forms() {
    let cache = scratch_dir("owlag");
    let ow = run_json(&["ow", "--n", "6", "--p", "2"], &cache);
    assert!((ow["c"].as_f64().unwrap() - 2f64.sqrt() / 3.0).abs() < 1e-9);

    let lag = run_json(&["lagrange", "--n", "8"], &cache);
    assert!((lag["lambda"].as_f64().unwrap() + 3f64.sqrt() / 2.0).abs() < 1e-9);
    assert!((lag["c"].as_f64().unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-9);
}

#[test]
fn table_rows_match_the_paper_constants() {
    let cache = scratch_dir("table");
    let rows = run_json(&["table"], &cache);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let row9 = rows.iter().find(|r| r["n"] == 9).unwrap();
    let want9 = 4.0 * (std::f64::consts::PI / 7.0).cos() / 9.0;
    assert!((row9["c_exact"].as_f64().unwrap() - want9).abs() < 1e-9);
    let row5 = rows.iter().find(|r| r["n"] == 5).unwrap();
    assert!((row5["c_exact"].as_f64().unwrap() - 0.468).abs() < 5e-3);
}

#[test]
fn cache_replays_byte_identical_records() {
    let cache = scratch_dir("cache");
    let first = run(&["exact", "--n", "7", "--p", "2"], &cache);
    let second = run(&["exact", "--n", "7", "--p", "2"], &cache);
    assert!(first.status.success() && second.status.success());
    assert_eq!(first.stdout, second.stdout, "cache hit must replay bytes");

    // Without the cache, only runtime_ms may differ.
    let fresh = run(&["exact", "--n", "7", "--p", "2", "--no-cache"], &cache);
    let strip = |bytes: &[u8]| -> Value {
        let mut v: Value = serde_json::from_slice(bytes).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(strip(&first.stdout), strip(&fresh.stdout));
}

#[test]
fn oracle_is_deterministic_for_a_seed() {
    let cache = scratch_dir("oracle");
    let args = [
        "oracle",
        "--n",
        "5",
        "--p",
        "2",
        "--seed",
        "7",
        "--restarts",
        "8",
        "--no-cache",
    ];
    let a = run(&args, &cache);
    let b = run(&args, &cache);
    let strip = |out: &[u8]| -> Value {
        let mut v: Value = serde_json::from_slice(out).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(strip(&a.stdout), strip(&b.stdout));
    let record: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((record["c"].as_f64().unwrap() - 0.4677).abs() < 1e-3);
    assert_eq!(record["seed"], 7);
}

#[test]
fn sweep_honors_a_custom_grid() {
    let cache = scratch_dir("sweepgrid");
    let record = run_json(
        &[
            "sweep",
            "--n",
            "4",
            "--p",
            "2",
            "--s-grid",
            "0.5:2:9",
            "--no-cache",
        ],
        &cache,
    );
    assert_eq!(record["s_grid"], "0.5:2:9");
    assert!((record["c_max"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((record["s_opt"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!(record["points"].as_array().unwrap().len() >= 9);
    let first = &record["points"][0];
    assert!((first["s"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn qneighbor_reports_the_reduction_plan() {
    let cache = scratch_dir("qn");
    let record = run_json(&["qneighbor", "--n", "6", "--q", "3"], &cache);
    assert_eq!(record["subring_count"], 3);
    assert_eq!(record["subring_size"], 2);
    assert!((record["c"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn stability_grid_emits_csv() {
    let cache = scratch_dir("stab");
    let out = run(&["stability", "--n-max", "9"], &cache);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,p,lhs,rhs,locally_optimal,marginal"
    );
    let five_two = text
        .lines()
        .find(|l| l.starts_with("5,2,"))
        .expect("5,2 row present");
    assert!(five_two.contains("false"));
    let nine_two = text
        .lines()
        .find(|l| l.starts_with("9,2,"))
        .expect("9,2 row present");
    assert!(nine_two.contains("true"));
}

#[test]
fn figures_writes_three_csv_files() {
    let cache = scratch_dir("figcache");
    let out_dir = scratch_dir("figs");
    let out = run(
        &[
            "figures",
            "--n-max",
            "6",
            "--jobs",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &cache,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fig1 = std::fs::read_to_string(out_dir.join("fig1.csv")).unwrap();
    assert!(fig1.starts_with("n,p,c_max"));
    let fig2 = std::fs::read_to_string(out_dir.join("fig2.csv")).unwrap();
    assert!(fig2.starts_with("n,p,c_ow,perturbation_improves,c_exact"));
    let fig3 = std::fs::read_to_string(out_dir.join("fig3.csv")).unwrap();
    assert!(fig3.starts_with("n,p,s_opt"));
    // Half filling rows carry s_opt = 1.
    let row = fig3
        .lines()
        .find(|l| l.starts_with("6,3,"))
        .expect("6,3 row");
    let s_opt: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((s_opt - 1.0).abs() < 1e-2, "s_opt = {s_opt}");
}

#[test]
fn basis_dump_lists_the_even_elements() {
    let cache = scratch_dir("dump");
    let dump = run_json(&["basis-dump", "--n", "8", "--p", "2"], &cache);
    assert_eq!(dump["dimension"], 4);
    assert_eq!(dump["necklace_count"], 4);
    assert_eq!(
        dump["elements"][0]["members"][0]["gaps"],
        serde_json::json!([1, 7])
    );
}

#[test]
fn csv_format_renders_single_records() {
    let cache = scratch_dir("csvfmt");
    let out = run(
        &[
            "ow",
            "--n",
            "8",
            "--p",
            "2",
            "--format",
            "csv",
            "--no-cache",
        ],
        &cache,
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,n,p,q,c,"));
    assert!(text.contains("ow,8,2,1,"));
}

#[test]
fn usage_and_numerical_exit_codes() {
    let cache = scratch_dir("codes");
    let bad_n = run(&["exact", "--n", "99", "--p", "2"], &cache);
    assert_eq!(bad_n.status.code(), Some(2));
    let stderr = String::from_utf8(bad_n.stderr).unwrap();
    let diag: Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(diag["error"], "usage");

    let unsupported = run(&["stability", "--n", "8", "--p", "2"], &cache);
    assert_eq!(unsupported.status.code(), Some(2));

    let unknown = Command::new(env!("CARGO_BIN_EXE_ringconc"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}
