//! The bundled instance corpus: parsing, scale limits, and the cross-check
//! suite.

use std::collections::BTreeSet;
use std::path::PathBuf;

use secgame::instance::{parse_instance, parse_instance_str};
use secgame::verify::{verify_instance, CheckStatus, ENUMERATION_LIMIT};
use secgame::Error;

fn bundled() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

#[test]
fn corpus_parses_and_covers_every_kind() {
    let mut kinds = BTreeSet::new();
    for path in bundled() {
        let inst = parse_instance(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(inst.name(), path.file_stem().and_then(|s| s.to_str()), "{}", path.display());
        assert!(inst.game.n() <= 10);
        let listed = inst.game.oracle().enumerate(ENUMERATION_LIMIT).unwrap();
        assert!(!listed.is_empty());
        kinds.insert(inst.file.set_system.kind());
    }
    assert_eq!(kinds.len(), 6, "{kinds:?}");
}

#[test]
fn cross_checks_pass_on_the_corpus() {
    for path in bundled() {
        let inst = parse_instance(&path).unwrap();
        let report = verify_instance(&inst.game, 20, inst.file.seed.unwrap_or(0));
        for outcome in &report.outcomes {
            assert_eq!(outcome.status, CheckStatus::Pass, "{}: {outcome}", path.display());
        }
    }
}

#[test]
fn large_families_skip_enumeration_checks() {
    let text = r#"{
        "targets": 16,
        "payoffs": {"reward": [1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1], "cost": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
                    "att_reward": [1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1], "att_cost": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]},
        "set_system": {"kind": "uniform_matroid", "k": 8}
    }"#;
    let inst = parse_instance_str(text).unwrap();
    let report = verify_instance(&inst.game, 5, 0);
    assert!(report.passed());
    assert!(report.outcomes.iter().any(|o| matches!(o.status, CheckStatus::Skipped(_))));
    assert!(report.outcomes.iter().any(|o| o.status == CheckStatus::Pass));
}

#[test]
fn flipped_payoff_sign_is_a_model_error() {
    let path = bundled().into_iter().find(|p| p.ends_with("g3.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    doc["payoffs"]["reward"][0] = serde_json::json!(-1);
    let err = parse_instance_str(&doc.to_string()).unwrap_err();
    assert!(matches!(err.root(), Error::StrictnessViolated { target: 0, .. }), "{err}");
    assert!(!err.is_numerical());
}
