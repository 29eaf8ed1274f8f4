mod common;

use qpip_cli::{CliError, ExperimentConfig};

#[test]
fn every_subcommand_config_round_trips() {
    for (name, c) in common::sample_configs() {
        assert_eq!(c.command.name(), name);
        c.validate().unwrap();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c, "{name}");
    }
}

#[test]
fn validation_names_the_field() {
    let (_, mut c) = common::sample_configs().into_iter().find(|(n, _)| *n == "qpip-clifford").unwrap();
    if let qpip_cli::Command::QpipClifford { trials, .. } = &mut c.command {
        *trials = 0;
    }
    match c.validate() {
        Err(CliError::Usage(m)) => assert!(m.contains("trials"), "{m}"),
        other => panic!("expected a usage error, got {other:?}"),
    }
}

#[test]
fn unknown_subcommands_are_rejected() {
    let bad = r#"{"seed": 0, "command": {"subcommand": "teleport-everything"}}"#;
    assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
}
