//! Replays the checked-in fuzz seeds through the parsers on stable.

use sigma_soliton::config::{parse_grid, parse_wavenumbers, FileConfig, Overrides, RunConfig};
use sigma_soliton::output::{format_complex, parse_complex, PeriodsDoc, TauDoc};
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| std::fs::read_to_string(entry.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    let mut resolved = 0;
    for text in seeds("parse_config") {
        if let Ok(file) = FileConfig::parse(&text) {
            if RunConfig::resolve(file, Overrides::default()).is_ok() {
                resolved += 1;
            }
        }
    }
    assert_eq!(resolved, 2);
}

#[test]
fn wavenumber_and_grid_seeds() {
    assert_eq!(
        seeds("parse_wavenumbers")
            .iter()
            .filter(|s| parse_wavenumbers(s).is_ok())
            .count(),
        2
    );
    assert_eq!(
        seeds("parse_grid")
            .iter()
            .filter(|s| parse_grid(s).is_ok())
            .count(),
        2
    );
}

#[test]
fn output_json_seeds() {
    let docs = seeds("parse_output_json");
    assert!(docs.iter().any(|s| PeriodsDoc::from_json(s).is_ok()));
    assert!(docs.iter().any(|s| TauDoc::from_json(s).is_ok()));
}

#[test]
fn complex_seeds() {
    for s in seeds("parse_complex") {
        let z = parse_complex(&s).unwrap();
        assert_eq!(parse_complex(&format_complex(z)), Some(z));
    }
}
