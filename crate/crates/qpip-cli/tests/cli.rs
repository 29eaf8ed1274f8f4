mod common;

use std::path::Path;
use std::process::{Command, Output};

use qpip_cli::{read_report, EXIT_ASSERTION, EXIT_OK, EXIT_USAGE};

fn qpipcli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpipcli"))
        .args(args)
        .current_dir(dir)
        .env_remove("QPIP_SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn passing_run_exits_zero_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpipcli(dir.path(), &["qpip-clifford", "--trials", "200", "--adversary", "z-flip"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stdout(&o));
    let r = read_report(&dir.path().join("qpip-clifford.report.json")).unwrap();
    assert_eq!(r.config.seed, 0);
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn failed_assertion_exits_one() {
    // the two-key bound does not hold for basis messages
    let dir = tempfile::tempdir().unwrap();
    let o = qpipcli(dir.path(), &["scan-signkey", "--out", "scan.json"]);
    assert_eq!(code(&o), EXIT_ASSERTION);
    assert!(stdout(&o).contains("FAIL"));
    assert!(!read_report(&dir.path().join("scan.json")).unwrap().failed().is_empty());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["qpip-clifford", "--trials", "0"][..],
        &["qpip-clifford", "--adversary", "bogus"],
        &["qpip-poly", "--q", "4"],
        &["qpip-poly", "--gates", "f:0"],
        &["blindness", "--circuit", "nowhere"],
        &["no-such-subcommand"],
        &["run", "missing.json"],
    ] {
        let o = qpipcli(dir.path(), args);
        assert_eq!(code(&o), EXIT_USAGE, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn negative_control_is_marked() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpipcli(dir.path(), &["zeno-demo", "--trials", "300"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stdout(&o));
    assert!(stdout(&o).contains("NEGATIVE CONTROL"));
    assert!(read_report(&dir.path().join("zeno-demo.report.json")).unwrap().negative_control);
}

#[test]
fn emitted_config_runs_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "11", "qpip-poly", "--trials", "50", "--adversary", "x-flip"];
    let o = qpipcli(dir.path(), &[&["--emit-config"][..], &args].concat());
    assert_eq!(code(&o), EXIT_OK);
    std::fs::write(dir.path().join("cfg.json"), &o.stdout).unwrap();
    assert!(!dir.path().join("qpip-poly.report.json").exists());

    assert_eq!(code(&qpipcli(dir.path(), &[&args[..], &["--out", "direct.json"]].concat())), EXIT_OK);
    assert_eq!(code(&qpipcli(dir.path(), &["run", "cfg.json", "--out", "via-config.json"])), EXIT_OK);
    let a = read_report(&dir.path().join("direct.json")).unwrap();
    let b = read_report(&dir.path().join("via-config.json")).unwrap();
    assert_eq!(a.config.seed, 11);
    assert_eq!(qpip_cli::numeric_fields(&a), qpip_cli::numeric_fields(&b));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qpipcli"))
        .args(["--emit-config", "zeno-demo"])
        .env("QPIP_SEED", "42")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let c: qpip_cli::ExperimentConfig = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c.seed, 42);
}

#[test]
fn replay_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpipcli(dir.path(), &["--seed", "3", "qpip-clifford", "--trials", "300", "--out", "a.json"]);
    assert_eq!(code(&o), EXIT_OK);
    let o = qpipcli(dir.path(), &["replay", "a.json", "--out", "b.json"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stdout(&o));
    assert!(stdout(&o).contains("identical"));
    let a = read_report(&dir.path().join("a.json")).unwrap();
    let b = read_report(&dir.path().join("b.json")).unwrap();
    assert_eq!(qpip_cli::numeric_fields(&a), qpip_cli::numeric_fields(&b));
}

#[test]
fn replay_detects_tampered_numbers() {
    let dir = tempfile::tempdir().unwrap();
    qpipcli(dir.path(), &["qpip-clifford", "--trials", "200", "--out", "a.json"]);
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    let accepts = v["body"]["accepts"].as_u64().unwrap();
    v["body"]["accepts"] = (accepts + 1).into();
    std::fs::write(dir.path().join("t.json"), serde_json::to_string(&v).unwrap()).unwrap();
    let o = qpipcli(dir.path(), &["replay", "t.json", "--out", "r.json"]);
    assert_eq!(code(&o), EXIT_ASSERTION);
    assert!(stdout(&o).contains("DIFFER"));
}

#[test]
fn replay_with_another_seed_resamples() {
    let dir = tempfile::tempdir().unwrap();
    qpipcli(dir.path(), &["qpip-clifford", "--trials", "300", "--out", "a.json"]);
    let o = qpipcli(dir.path(), &["replay", "a.json", "--override-seed", "99", "--out", "b.json"]);
    assert_eq!(code(&o), EXIT_OK);
    assert!(!stdout(&o).contains("identical"));
    let a = read_report(&dir.path().join("a.json")).unwrap();
    let b = read_report(&dir.path().join("b.json")).unwrap();
    assert_eq!(b.config.seed, 99);
    assert_eq!(a.config.command, b.config.command);
    assert_ne!(a.body, b.body);
}

#[test]
fn replay_rejects_corrupted_and_foreign_reports() {
    let dir = tempfile::tempdir().unwrap();
    qpipcli(dir.path(), &["blindness", "--out", "a.json"]);
    let text = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    std::fs::write(dir.path().join("truncated.json"), &text[..text.len() / 2]).unwrap();
    std::fs::write(
        dir.path().join("future.json"),
        text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1),
    )
    .unwrap();
    std::fs::write(dir.path().join("no-version.json"), text.replacen("\"schema_version\": 1,", "", 1)).unwrap();
    for f in ["truncated.json", "future.json", "no-version.json", "absent.json"] {
        let o = qpipcli(dir.path(), &["replay", f]);
        assert_eq!(code(&o), EXIT_USAGE, "{f}");
    }
}

#[test]
fn transcript_file_lists_every_round() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpipcli(
        dir.path(),
        &["qpip-clifford", "--trials", "10", "--transcript", "t.txt", "--out", "a.json"],
    );
    assert_eq!(code(&o), EXIT_OK);
    let text = std::fs::read_to_string(dir.path().join("t.txt")).unwrap();
    let t = qpip_core::qpip::transcript::Transcript::from_lines(&text).unwrap();
    t.validate().unwrap();
    assert!(text.lines().count() > 3);
}
