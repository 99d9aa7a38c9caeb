use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chenwarp"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chenwarp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_scene(name: &str, text: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn analyze_three_sphere_succeeds() {
    let out = scratch("s3.json");
    let o = run(&["analyze", "s3_warped", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let slack = report["summary"]["min_slack"]["chen41ii"].as_f64().unwrap();
    assert!((slack - 2.5).abs() < 1e-6);
    assert_eq!(report["status"], 0);
}

#[test]
fn case_i_on_a_one_dimensional_base_is_an_input_error() {
    let text = chenwarp_cli::catalog::source("s3_warped")
        .unwrap()
        .replace("checks = [", "checks = [\"chen41i\", ");
    let path = write_scene("case_i.toml", &text);
    let o = run(&["analyze", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("case i requires n₁ ≥ 2"));
}

#[test]
fn corrupted_metric_block_is_a_validation_error() {
    let text = chenwarp_cli::catalog::source("s2_revolution")
        .unwrap()
        .replace("warp = \"sin(t)\"", "warp = \"cos(t)\"")
        .replace("t = [0.0, \"pi\"]", "t = [0.1, 1.4]");
    let path = write_scene("corrupt.toml", &text);
    let o = run(&["analyze", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ValidationError"));
}

#[test]
fn failed_checks_give_status_two_and_still_write_the_report() {
    let out = scratch("tight.json");
    let o = run(&["analyze", "cylinder", "--tol", "slack=0", "--tol", "trace=0", "--out", out.to_str().unwrap()]);
    // the trace identity has round-off above an exact-zero threshold somewhere
    let code = o.status.code().unwrap();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let failed = report["summary"]["failed"].as_array().unwrap();
    assert_eq!(code == 2, !failed.is_empty());
    assert_eq!(report["status"].as_i64().unwrap(), code as i64);
}

#[test]
fn bad_tolerance_key() {
    let o = run(&["analyze", "cylinder", "--tol", "bogus=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_catalog_entry() {
    let o = run(&["catalog", "show", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown catalog entry"));
}

#[test]
fn catalog_lists_all_entries() {
    let o = run(&["catalog", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().count(), 8);
    let show = run(&["catalog", "show", "great_sphere_s4"]);
    assert!(String::from_utf8_lossy(&show.stdout).contains("kind = \"sphere\""));
}

#[test]
fn scan_writes_lexicographic_rows() {
    let csv_path = scratch("cyl.csv");
    let o = run(&["scan", "cylinder", "--csv", csv_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "t");
    assert_eq!(&header[1], "s");
    assert_eq!(&header[2], "mean_h2");
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 25);
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn scene_without_grid_cannot_be_scanned() {
    let text = chenwarp_cli::catalog::source("cylinder")
        .unwrap()
        .replace("[points.grid]\ncounts = [5, 5]", "[points]\nexplicit = [[0.0, 1.0]]");
    let path = write_scene("nogrid.toml", &text);
    let o = run(&["scan", &path, "--csv", scratch("nogrid.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn identities_command() {
    let o = run(&["identities", "--random", "5000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["lemma11"]["instances"], 5000);
}

#[test]
fn seed_flag_is_stamped() {
    let o = run(&["analyze", "plane_product", "--seed", "42"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 42);
}
