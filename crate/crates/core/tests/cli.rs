use std::path::Path;
use std::process::{Command, Output};

fn bpcentre(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpcentre"))
        .args(args)
        .env("BPCENTRE_CACHE_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eta_table_builds_then_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = bpcentre(dir.path(), &["eta-table", "--p", "3", "--max-weight", "13"]);
    assert_eq!(first.status.code(), Some(0));
    let out = stdout(&first);
    assert!(out.starts_with("cache built"));
    assert!(out.contains("η_R(v_1) = v_1 + 3·t_1"));
    assert!(out.contains("    13          5    201             13"));
    let cache = dir.path().join("eta_r_p3_w13.json");
    let bytes = std::fs::read(&cache).unwrap();

    let second = bpcentre(dir.path(), &["eta-table", "--p", "3", "--max-weight", "13"]);
    assert_eq!(second.status.code(), Some(0));
    assert!(stdout(&second).starts_with("cache hit"));
    assert_eq!(bytes, std::fs::read(&cache).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["eta-table", "--p", "2"][..],
        &["eta-table", "--p", "9"],
        &["verify", "nonsense"],
        &["lattices", "--N", "20"],
        &["lattices", "--q", "4"],
        &["lattices", "--caps", "3"],
        &["verify", "all", "--format", "xml"],
        &["verify", "all", "--heights", "0"],
        &["frobnicate"],
    ] {
        let o = bpcentre(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "no cache written on usage errors");
}

#[test]
fn mismatched_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let p = path.to_str().unwrap();
    assert_eq!(bpcentre(dir.path(), &["eta-table", "--max-weight", "4", "--N", "4", "--cache", p]).status.code(), Some(0));
    let o = bpcentre(dir.path(), &["eta-table", "--max-weight", "5", "--cache", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cache mismatch"));
}

#[test]
fn verify_triangular_and_centre_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcentre(dir.path(), &["verify", "triangular", "--p", "3", "--max-weight", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = report["suites"][0]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 9);
    assert!(checks.iter().all(|c| c["status"] == "PASS"));
    assert_eq!(report["config"]["max_weight"], 8);
    assert_eq!(report["cache"]["fingerprint"].as_str().unwrap().len(), 64);

    let o = bpcentre(dir.path(), &["verify", "centre", "--p", "3", "--heights", "1,2", "--max-weight", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn weight_zero_table_passes_everything() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcentre(dir.path(), &["verify", "all", "--max-weight", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn trivial_window_lattices() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcentre(dir.path(), &["lattices", "--p", "3", "--N", "0", "--heights", "1", "--max-weight", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["lattices"]["sg"], serde_json::json!([0]));
    assert_eq!(report["lattices"]["diagonal"]["1"], serde_json::json!([0]));
    assert_eq!(report["lattices"]["inclusion"], true);
    assert_eq!(report["lattices"]["gap"]["1"], 0);
}

#[test]
fn lattice_inclusion_failure_exits_1_with_divisor_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcentre(dir.path(), &["lattices", "--p", "3", "--N", "5", "--heights", "1,2", "--max-weight", "5", "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(1));
    let md = stdout(&o);
    assert!(md.contains("S_g window: elementary divisors [p^0, p^0, p^1, p^2, p^2, p^4]"));
    assert!(md.contains("| 1 | [p^0, p^1, p^2, p^4, p^5, p^5] | FAIL |"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not in the diagonal lattice"));
}

#[test]
fn exhausted_caps_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = bpcentre(dir.path(), &["lattices", "--N", "6", "--max-weight", "6", "--caps", "2,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stabilization not reached"));
}

#[test]
fn reports_are_deterministic_in_every_format() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["json", "csv", "markdown"] {
        let args = ["verify", "all", "--max-weight", "8", "--format", format];
        let a = bpcentre(dir.path(), &args);
        let b = bpcentre(dir.path(), &args);
        assert_eq!(a.stdout, b.stdout, "{format}");
        assert_eq!(a.status.code(), b.status.code());
    }
}
