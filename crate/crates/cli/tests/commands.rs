use std::path::PathBuf;
use std::process::Command;

use pbwforge_cli::document::{build_instance, canonical_document, parse_instance, to_json, RuleDoc};
use pbwforge_cli::{run_cli, CliError};
use pbwforge_core::fixtures::fixture;
use serde_json::Value;

fn run(args: &[&str]) -> (u8, String, String) {
    run_cli(std::iter::once("pbwforge").chain(args.iter().copied()))
}

fn json_of(args: &[&str]) -> (u8, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, _) = run(&a);
    (code, serde_json::from_str(&out).expect("json report"))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pbwforge-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_on_translated_shear_exits_zero() {
    for p in ["3", "5", "7"] {
        let (code, r) = json_of(&["check", "--fixture", "example-6-1", "--prime", p]);
        assert_eq!(code, 0);
        assert_eq!(r["check"]["method"], "poly");
        assert_eq!(r["check"]["pbw"], true);
    }
}

#[test]
fn full_on_mutated_fixture_exits_one_with_matching_verdicts() {
    let text = to_json(&canonical_document(&fixture("example-6-2", Some(5)).unwrap()));
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    // lambda(g, w) = g breaks the cocycle recurrence
    doc["parameters"]["lambda"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({"group": "g0", "vector": 1, "value": {"g0": 1}}));
    let path = scratch("mutated.json", &doc.to_string());
    let (code, r) = json_of(&["full", "--instance", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v = &r["verdicts"];
    assert_eq!(v["agree"], true);
    assert_eq!(v["general"], false);
    assert_eq!(v["poly"], false);
    assert_eq!(v["diamond"], false);
    assert!(r["diamond"]["failures_by_condition"]["1"].as_u64().unwrap() > 0);
    let witness = r["check"]["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "1")
        .unwrap();
    assert_eq!(witness["status"], "fail");
    assert!(witness["witness"]["input"].is_string());
}

#[test]
fn untwist_on_shear_plane_is_a_modular_obstruction() {
    for p in ["3", "5"] {
        let (code, r) = json_of(&["untwist", "--fixture", "example-6-2", "--prime", p]);
        assert_eq!(code, 2);
        assert_eq!(r["error"]["kind"], "ModularObstruction");
        let (code, r) = json_of(&["probe-modular", "--fixture", "example-6-2", "--prime", p]);
        assert_eq!(code, 0);
        assert_eq!(r["probe"]["certified"], true);
    }
}

#[test]
fn untwist_demo_succeeds() {
    let (code, r) = json_of(&["untwist", "--fixture", "nonmodular-untwist-demo"]);
    assert_eq!(code, 0);
    assert_eq!(r["untwist"]["target_poly_pbw"], true);
    assert_eq!(r["untwist"]["target_diamond_pbw"], true);
    assert!(r["untwisted_instance"]["parameters"].get("lambda").is_none());
    let (code, r) = json_of(&["probe-modular", "--fixture", "nonmodular-untwist-demo"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "NotModular");
}

#[test]
fn diamond_brute_force_matches_on_demo() {
    let (code, r) = json_of(&["diamond", "--fixture", "nonmodular-untwist-demo", "--degree", "3"]);
    assert_eq!(code, 0);
    let fd = &r["filtered_dims"];
    assert_eq!(fd["word_cap"], 4);
    assert_eq!(fd["brute_force"], serde_json::json!([2, 6, 12, 20]));
    assert_eq!(fd["matches"], true);
}

#[test]
fn empty_parameters_give_the_trivial_deformation() {
    let text = r#"{"format_version": 1, "field": {"kind": "rational"},
        "group": {"generators": [[[0, 1], [1, 0]]]},
        "algebra": {"dim": 2, "relations": "symmetric"}, "parameters": {}}"#;
    let d = build_instance(&parse_instance(text).unwrap()).unwrap();
    assert_eq!(d.group.order(), 2);
    assert!(d.lambda_is_zero());
    let p = d.poly_params().unwrap();
    assert!(p.kappa_c.is_empty() && p.kappa_l.is_empty());
    let path = scratch("trivial.json", text);
    assert_eq!(run(&["full", "--instance", path.to_str().unwrap()]).0, 0);
}

#[test]
fn modulus_two_is_rejected_at_the_modulus() {
    let text = r#"{"format_version": 1, "field": {"kind": "prime", "modulus": 2},
        "group": {}, "algebra": {"dim": 2, "relations": "symmetric"}}"#;
    let err = build_instance(&parse_instance(text).unwrap()).unwrap_err();
    match err {
        CliError::Validation { path, message } => {
            assert_eq!(path, "field.modulus");
            assert!(message.contains('2'), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
    let path = scratch("mod2.json", text);
    let (code, r) = json_of(&["validate", "--instance", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["path"], "field.modulus");
}

#[test]
fn parse_errors_carry_positions_and_unknown_keys_fail() {
    let text = "{\n  \"format_version\": 1,\n  \"colour\": 3\n}";
    match parse_instance(text).unwrap_err() {
        CliError::Parse { line, column, message } => {
            assert_eq!(line, 3);
            assert!(column > 0);
            assert!(message.contains("colour"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_instance("{\"format_version\": 1,"), Err(CliError::Parse { line: 1, .. })));
}

fn validation_path(text: &str) -> String {
    match build_instance(&parse_instance(text).unwrap()) {
        Err(CliError::Validation { path, .. }) => path,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn cross_references_are_bounds_checked() {
    let base = |params: &str| {
        format!(
            r#"{{"format_version": 1, "field": {{"kind": "prime", "modulus": 3}},
            "group": {{"generators": [[[1, 1], [0, 1]]]}},
            "algebra": {{"dim": 2, "relations": "symmetric"}}, "parameters": {params}}}"#
        )
    };
    assert_eq!(
        validation_path(&base(r#"{"lambda": [{"group": "g0", "vector": 2, "value": {}}]}"#)),
        "parameters.lambda[0].vector"
    );
    assert_eq!(
        validation_path(&base(r#"{"lambda": [{"group": "g7", "vector": 0, "value": {}}]}"#)),
        "parameters.lambda[0].group"
    );
    assert_eq!(
        validation_path(&base(r#"{"kappa_c": [{"pair": [0, 0], "value": {}}]}"#)),
        "parameters.kappa_c[0].pair"
    );
    assert_eq!(
        validation_path(&base(r#"{"kappa_l": [{"pair": [0, 1], "value": {"v5": 1}}]}"#)),
        "parameters.kappa_l[0].value.v5"
    );
    assert_eq!(
        validation_path(&base(r#"{"kind": "general", "alpha": [{"relation": 4, "value": {}}]}"#)),
        "parameters.alpha[0].relation"
    );
    let bad_group = r#"{"format_version": 1, "field": {"kind": "rational"},
        "group": {"generators": [[[1, 0]]]}, "algebra": {"dim": 2, "relations": "symmetric"}}"#;
    assert_eq!(validation_path(bad_group), "group.generators[0]");
    // the quantum-plane relation is not stable under the swap
    let unstable = r#"{"format_version": 1, "field": {"kind": "rational"},
        "group": {"generators": [[[0, 1], [1, 0]]]},
        "algebra": {"dim": 2, "relations": [{"v1*v0": 1, "v0*v1": -2}]}}"#;
    assert_eq!(validation_path(unstable), "algebra");
}

#[test]
fn rationals_and_explicit_rules_parse() {
    let text = r#"{"format_version": 1, "field": {"kind": "rational"},
        "group": {"generators": [[[-1, 0], [0, -1]]]},
        "algebra": {"dim": 2, "relations": [{"v1*v0": 1, "v0*v1": "-3/2"}],
                    "rules": [{"lead": "v1*v0", "tail": {"v0*v1": "3/2"}}]},
        "parameters": {"kind": "general", "beta": [{"relation": 0, "value": {"e": "1/3"}}]}}"#;
    let doc = parse_instance(text).unwrap();
    let d = build_instance(&doc).unwrap();
    let canon = canonical_document(&d);
    // derived rules coincide with the given ones, so they are dropped
    assert!(canon.algebra.rules.is_none());
    assert_eq!(build_instance(&canon).unwrap().quadratic, d.quadratic);
    let (code, _, _) = run(&["check", "--instance", scratch("qplane.json", text).to_str().unwrap()]);
    assert_eq!(code, 0);

    let mut wrong = doc.clone();
    wrong.algebra.rules = Some(vec![RuleDoc {
        lead: "v1*v0".into(),
        tail: [("v0*v1".to_string(), pbwforge_cli::document::ScalarDoc::Int(2))].into(),
    }]);
    assert_eq!(
        match build_instance(&wrong) {
            Err(CliError::Validation { path, .. }) => path,
            other => panic!("{other:?}"),
        },
        "algebra"
    );
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["full", "--fixture", "example-6-1", "--json"],
        vec!["diamond", "--fixture", "example-6-2", "--degree", "2", "--json"],
        vec!["untwist", "--fixture", "nonmodular-untwist-demo", "--json"],
        vec!["full", "--seed", "17", "--json"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a, b);
        assert!(!a.1.contains("timings_ms"));
    }
    let (_, out, _) = run(&["check", "--fixture", "example-6-1", "--json", "--timings"]);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert!(r["timings_ms"]["check"].is_number());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["check"]).0, 2);
    assert_eq!(run(&["check", "--fixture", "example-6-1", "--seed", "1"]).0, 2);
    assert_eq!(run(&["check", "--fixture", "no-such-fixture"]).0, 2);
    assert_eq!(run(&["check", "--fixture", "symmetric-trivial", "--prime", "5"]).0, 2);
    assert_eq!(run(&["check", "--fixture", "example-6-1", "--word-cap", "3"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["check", "--instance", "/nonexistent/file.json"]).0, 2);
}

#[test]
fn fixtures_and_schema() {
    let (code, out, _) = run(&["fixtures"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
    let (code, out, _) = run(&["fixtures", "--fixture", "example-6-1", "--prime", "5"]);
    assert_eq!(code, 0);
    let d = build_instance(&parse_instance(&out).unwrap()).unwrap();
    assert_eq!(d.group.order(), 5);
    let (code, out, _) = run(&["--schema"]);
    assert_eq!(code, 0);
    let schema: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(schema["properties"]["format_version"]["const"], 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pbwforge");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["check", "--fixture", "example-6-1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PBW"));
    let obstruction = status(&["untwist", "--fixture", "example-6-2"]);
    assert_eq!(obstruction.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&obstruction.stderr).contains("ModularObstruction"));
    let emitted = status(&["fixtures", "--fixture", "example-6-2"]);
    let path = scratch("emitted.json", &String::from_utf8_lossy(&emitted.stdout));
    assert_eq!(status(&["full", "--instance", path.to_str().unwrap()]).status.code(), Some(0));
}
