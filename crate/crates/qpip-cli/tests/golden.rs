//! Every subcommand against a stored report. Regenerate with
//! `QPIP_BLESS=1 cargo test -p qpip-cli --test golden`.

mod common;

use std::path::PathBuf;

use qpip_cli::{execute, numeric_fields};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn reports_match_golden_files() {
    let bless = std::env::var_os("QPIP_BLESS").is_some();
    let mut failures = Vec::new();
    for (name, config) in common::sample_configs() {
        let report = execute(&config).unwrap();
        let got = numeric_fields(&report);
        let path = golden_dir().join(format!("{name}.json"));
        if bless {
            std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap()).unwrap();
            continue;
        }
        let want: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        // exact sums are reproducible to rounding; sampled runs are seeded
        if let Err(e) = common::json_close(&got, &want, 1e-9, name) {
            failures.push(e);
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
