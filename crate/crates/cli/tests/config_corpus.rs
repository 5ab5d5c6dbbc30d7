//! Replays the fuzz seed corpora through the same invariants the fuzz
//! targets check.

use std::fs;
use std::path::PathBuf;

use beamwave::{parse_config, Command};

fn corpus(name: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(name);
    let mut seeds: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&path).unwrap(),
            )
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty());
    seeds
}

#[test]
fn config_seeds_round_trip() {
    let mut accepted = 0;
    for (name, text) in corpus("config_parse") {
        if let Ok(config) = parse_config(&text) {
            let again = serde_json::to_string(&config).unwrap();
            assert_eq!(parse_config(&again).unwrap(), config, "{name}");
            accepted += 1;
        }
    }
    assert!(accepted >= 5);
}

#[test]
fn command_seeds_round_trip() {
    for (name, text) in corpus("command_parse") {
        match text.parse::<Command>() {
            Ok(command) => assert_eq!(command.name(), text),
            Err(e) => assert!(e.to_string().contains("unknown command"), "{name}"),
        }
    }
}
