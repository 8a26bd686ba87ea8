//! Reconstructed tracks are diffed against frozen copies. Set
//! `TTLAB_BLESS=1` to rewrite the files after an intended change.

use std::path::PathBuf;

use ttlab_core::atlas::Atlas;
use ttlab_core::format::{parse_track, write_track};

fn check(name: &str, text: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.tt"));
    if std::env::var_os("TTLAB_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
        return;
    }
    let frozen =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, frozen, "{name} differs from {}", path.display());
}

#[test]
fn switch_tables_match_golden_files() {
    let a = Atlas::get();
    for t in [&a.tau, &a.tau_prime, &a.tau_initial] {
        check(t.name(), &write_track(t));
    }
}

#[test]
fn golden_files_parse_back() {
    let a = Atlas::get();
    let text = write_track(&a.tau);
    let back = parse_track(&text).unwrap();
    assert!(back.same_structure(&a.tau));
}
