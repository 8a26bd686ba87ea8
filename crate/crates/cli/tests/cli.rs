use std::path::Path;
use std::process::{Command, Output};

fn ttlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttlab"))
        .args(args)
        .output()
        .expect("ttlab runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn certify_phi2_is_pa() {
    let o = ttlab(&["map", "certify", "atlas:phi2", "--expect", "pA"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("verdict: pA"));
    assert!(out.contains("at 37/44 expansion 45: c -> k -> h"));
}

#[test]
fn expect_mismatch_exits_one_with_witness() {
    let o = ttlab(&["map", "certify", "atlas:phi1", "--expect", "pA"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("invariant subgraph: {a,c,d,f,g,h,j,k,l}"));
    assert!(stderr(&o).contains("expected verdict pA, got reducible"));
}

#[test]
fn missing_file_exits_two() {
    let o = ttlab(&["track", "info", "missing.tt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.tt"));
}

#[test]
fn unknown_atlas_entry_exits_two() {
    let o = ttlab(&["map", "certify", "atlas:phi4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ttlab(&["map", "certify", "atlas:tau"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_error_exits_two() {
    let o = ttlab(&["map", "certify"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ttlab(&["map", "certify", "atlas:phi2", "--expect", "anosov"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exported_map_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = ttlab(&["atlas", "export", "phi2", "--out", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = dir.path().join("phi2.tt");
    assert!(file.is_file());
    let f = file.to_str().unwrap();
    let a = ttlab(&["--json", "map", "certify", f]);
    let b = ttlab(&["--json", "map", "certify", "atlas:phi2"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn exported_track_validates() {
    let dir = tempfile::tempdir().unwrap();
    let o = ttlab(&[
        "atlas",
        "export",
        "tau_prime",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let f = dir.path().join("tau_prime.tt");
    let o = ttlab(&["track", "validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tau_prime: valid"));
}

#[test]
fn broken_track_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.tt");
    std::fs::write(
        &f,
        "[track]\nname = bad\nedges = a b\n\n[switch v1]\nsideA = t(a)\nsideB = i(b)\n",
    )
    .unwrap();
    let o = ttlab(&["track", "validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("bad: invalid"));
}

#[test]
fn json_certificate_parses() {
    let o = ttlab(&["--json", "map", "certify", "atlas:psi2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"]["kind"], "pA");
    assert_eq!(v["fixed_point_free"], true);
}

#[test]
fn track_info_reports_invariants() {
    let o = ttlab(&["--json", "track", "info", "atlas:tau"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["euler"]["genus"], 3);
    assert_eq!(v["cusps"], 12);
    assert_eq!(v["oriented_automorphisms"], 2);
}

#[test]
fn twist_block_applies_from_tau() {
    let o = ttlab(&["seq", "apply", "--track", "atlas:tau", "atlas:T_ig"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("k = g k g"));
    let o = ttlab(&["seq", "apply", "--track", "atlas:tau_prime", "atlas:T_ig"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("move 1 of the sequence is illegal"));
}

#[test]
fn compose_matches_family() {
    let o = ttlab(&["--json", "map", "compose", "atlas:phi1", "atlas:T_pair"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let composite: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let o = ttlab(&["--json", "atlas", "phi", "--n", "3"]);
    let phi3: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(composite["images"], phi3["images"]);
}

#[test]
fn dot_export_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = ttlab(&[
        "track",
        "export-dot",
        "atlas:tau",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(Path::new(dir.path()).join("tau.dot")).unwrap();
    assert!(text.starts_with("digraph"));
}

#[test]
fn search_writes_one_file_per_loop() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = ttlab(&["search", "loops", "atlas:tau", "--depth", "4", "--out", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = stdout(&o);
    let n = std::fs::read_dir(dir.path()).unwrap().count();
    let reported = first.lines().filter(|l| l.contains(" | ")).count();
    assert_eq!(n, reported);
    assert_eq!(n, 160);
    let again = ttlab(&[
        "search",
        "loops",
        "atlas:tau",
        "--depth",
        "4",
        "--threads",
        "2",
    ]);
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("wrote"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&first), strip(&stdout(&again)));
}
