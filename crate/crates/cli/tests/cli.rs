//! Command-line behaviour: exit codes, error positions, report contents.

use std::path::{Path, PathBuf};

use ntoda::angcat::{is_morphism_of_nseqs, Morphism};
use ntoda_cli::build::Built;
use ntoda_cli::scene::Scene;
use ntoda_cli::CliError;
use serde_json::Value;

fn scene_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ntoda-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn cli(args: &[&str]) -> i32 {
    ntoda_cli::main_with_args(std::iter::once("ntoda").chain(args.iter().copied()))
}

fn run_with_report(scene: &Path, name: &str) -> (i32, Value) {
    let out = scratch(name, "");
    let code = cli(&["run", scene.to_str().unwrap(), "--report", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    (code, serde_json::from_str(&text).unwrap())
}

fn task<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["sections"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["tasks"].as_array().unwrap())
        .find(|t| t["name"] == name)
        .unwrap_or_else(|| panic!("no task {name}"))
}

#[test]
fn empty_scene_gives_an_empty_passing_report() {
    let p = scratch("empty.json", "");
    let (code, report) = run_with_report(&p, "empty-report.json");
    assert_eq!(code, 0);
    assert_eq!(report["sections"], Value::Array(vec![]));
    assert_eq!(report["summary"]["pass"], 0);
}

#[test]
fn parse_errors_report_line_and_column_and_exit_2() {
    let text = "{\n  \"schema\": 1,\n  \"backend\": { \"kind\": \"free_local\", \"p\": 2 },\n  \"tasks\": [ { \"task\": \"hom_dim\" \n}";
    let err = Scene::from_str(text, "broken.json").unwrap_err();
    match &err {
        CliError::Parse { line, .. } => assert!(*line >= 4, "{err}"),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert_eq!(err.exit_code(), 2);
    let p = scratch("broken.json", text);
    assert_eq!(cli(&["run", p.to_str().unwrap()]), 2);
}

#[test]
fn unknown_names_are_validation_errors() {
    let text = r#"{ "backend": { "kind": "free_local", "p": 2 },
        "tasks": [ { "task": "bracket", "chain": ["f", "f", "f", "f"] } ] }"#;
    let scene = Scene::from_str(text, "x.json").unwrap();
    let report = ntoda_cli::run_scene_value(&scene, "x", &Default::default()).unwrap();
    assert_eq!(report.summary.error, 1);
    assert!(!report.passed());
}

#[test]
fn failed_expectations_exit_1_and_name_the_task() {
    let text = r#"{ "backend": { "kind": "free_local", "p": 2 },
        "morphisms": [ { "name": "two", "scalar": 2 } ],
        "tasks": [ { "name": "wrong on purpose", "task": "bracket", "chain": ["two", "two", "two", "two"],
                     "expect": { "contains_zero": true } } ] }"#;
    let p = scratch("failing.json", text);
    let (code, report) = run_with_report(&p, "failing-report.json");
    assert_eq!(code, 1);
    let t = task(&report, "wrong on purpose");
    assert_eq!(t["status"], "fail");
    assert_eq!(t["result"]["display"], "1 + (2)");
}

#[test]
fn shipped_scenes_pass() {
    for name in ["scalar_brackets.json", "gamma1.json", "gamma2.json"] {
        let p = scene_path(name);
        assert_eq!(cli(&["run", p.to_str().unwrap()]), 0, "{name}");
    }
}

#[test]
fn report_echoes_normalized_morphisms_and_provenance() {
    let (_, report) = run_with_report(&scene_path("gamma2.json"), "gamma2-report.json");
    let sec = &report["sections"][0];
    assert_eq!(sec["provenance"]["p"], 5);
    assert_eq!(sec["provenance"]["lambda"], 2);
    let eps11 = sec["morphisms"].as_array().unwrap().iter().find(|m| m["name"] == "eps11").unwrap();
    assert_eq!(eps11["entered_as"], "chain_map");
    let bracket = task(&report, "eps11 bracket");
    let flavor = &bracket["result"]["flavors"][0]["bracket"];
    assert_eq!(flavor["hom"]["basis"].as_array().unwrap().len(), 2);
    assert_eq!(flavor["subgroup_basis"].as_array().unwrap().len(), 1);
}

#[test]
fn heller_witnesses_replay() {
    let (_, report) = run_with_report(&scene_path("gamma2.json"), "replay-report.json");
    let built = Built::build(&Scene::load(&scene_path("gamma2.json")).unwrap().sections().unwrap()[0]).unwrap();
    let b = built.b();
    for (name, seq) in [("p62 row is a 4-angle", "p62_row"), ("p61 row is a 4-angle", "p61_row")] {
        let w = &task(&report, name)["result"]["witness"];
        assert_eq!(w["replayed"], true, "{name}");
        // rebuild the components from the report alone and check them again
        let s = built.sequence(seq).unwrap();
        let ext = b.extend(&s.maps[0]).unwrap();
        let comps: Vec<Morphism> = w["components"]
            .as_array()
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let coords = c["coords"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
                Morphism::new(ext.objects[i], s.objects[i], b.ring(), coords)
            })
            .collect();
        assert!(is_morphism_of_nseqs(b, &ext, s, &comps), "{name}");
    }
}

#[test]
fn describe_hom_and_oracle_verbs() {
    let g1 = scene_path("gamma1.json");
    assert_eq!(cli(&["describe-hom", g1.to_str().unwrap(), "--src", "P2", "--tgt", "P3"]), 0);
    assert_eq!(cli(&["describe-hom", g1.to_str().unwrap(), "--src", "nope", "--tgt", "P3"]), 2);
    let sb = scene_path("scalar_brackets.json");
    assert_eq!(cli(&["oracle", sb.to_str().unwrap()]), 0);
    assert_eq!(cli(&["oracle", sb.to_str().unwrap(), "--cap", "1"]), 1);
}

#[test]
fn suites_run_from_the_command_line() {
    assert_eq!(cli(&["suite", "heller", "--cases", "20", "--seed", "7"]), 0);
    assert_eq!(cli(&["suite", "juggling", "--cases", "10", "--primes", "5"]), 0);
    assert_eq!(cli(&["suite", "nonsense"]), 2);
}
