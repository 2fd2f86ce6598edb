use std::path::{Path, PathBuf};
use std::process::Command;

use procat::cli::{self, parse_document, scenario_document, serialize_document, CheckArgs, Outcome};
use procat::deciders::Certificate;
use serde_json::Value;

fn scenario_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{}.json", name))
}

fn check(file: &Path, property: Option<&str>, subject: Option<&str>) -> Outcome {
    cli::cmd_check(&CheckArgs { file, property, subject, horizon: None, certificate_out: None, json: false })
}

fn procat(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_procat")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into(),
        String::from_utf8_lossy(&out.stderr).into(),
    )
}

const SHIPPED: [&str; 7] = [
    "z-to-z2",
    "dyadic-to-z",
    "constant-tower",
    "constant-identity",
    "dyadic",
    "z8-nilpotent",
    "finset-eventual-image",
];

#[test]
fn shipped_documents_match_the_builtin_scenarios() {
    for name in SHIPPED {
        let text = std::fs::read_to_string(scenario_file(name)).unwrap();
        let ws = parse_document(&text).unwrap();
        assert_eq!(ws, scenario_document(name).unwrap(), "{}", name);
        assert_eq!(serialize_document(&ws).unwrap(), text, "{} is not in canonical form", name);
    }
}

#[test]
fn shipped_documents_check_as_expected() {
    // Every query in a scenario document is an expectation that holds, except the
    // failing ones the scenario names; the exit code summarizes them.
    let expected = [
        ("z-to-z2", 1),
        ("dyadic-to-z", 1),
        ("constant-tower", 0),
        ("constant-identity", 0),
        ("dyadic", 1),
        ("z8-nilpotent", 0),
        ("finset-eventual-image", 0),
    ];
    for (name, code) in expected {
        let out = check(&scenario_file(name), None, None);
        assert_eq!(out.code, code, "{}\n{}{}", name, out.stdout, out.stderr);
    }
}

#[test]
fn single_queries_give_their_exit_codes() {
    let file = scenario_file("z-to-z2");
    assert_eq!(check(&file, Some("epi"), None).code, cli::EXIT_HOLDS);
    let out = check(&file, Some("strong-epi"), None);
    assert_eq!(out.code, cli::EXIT_FAILS);
    assert!(out.stdout.contains("α=0"), "{}", out.stdout);
    assert_eq!(check(&file, Some("sideways"), None).code, cli::EXIT_USAGE);
    assert_eq!(check(&file, Some("epi"), Some("nobody")).code, cli::EXIT_USAGE);
    assert_eq!(check(Path::new("/nonexistent/doc.json"), None, None).code, cli::EXIT_NO_INPUT);

    let dyadic = scenario_file("dyadic-to-z");
    let out = check(&dyadic, Some("strong-mono"), None);
    assert_eq!(out.code, cli::EXIT_FAILS);
    assert!(out.stdout.contains("α=1"), "{}", out.stdout);
}

#[test]
fn malformed_documents_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{ \"format\": "),
        ("format.json", r#"{"format": "procat/9", "category": "finset"}"#),
        ("category.json", r#"{"format": "procat/1", "category": "groups"}"#),
        (
            "bond.json",
            r#"{"format": "procat/1", "category": "finset",
                "systems": [{"name": "X", "tower": {"period": {"objects": [2], "bonds": [[0, 5]]}}}]}"#,
        ),
    ];
    for (file, text) in cases {
        let path = dir.path().join(file);
        std::fs::write(&path, text).unwrap();
        let out = check(&path, None, None);
        assert_eq!(out.code, cli::EXIT_DATA, "{}: {}", file, out.stderr);
        assert!(out.stderr.starts_with("error:"), "{}", out.stderr);
    }
}

#[test]
fn certificates_verify_and_bind_to_their_subject() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("stable.cert.json");
    let file = scenario_file("constant-tower");
    let out = cli::cmd_check(&CheckArgs {
        file: &file,
        property: Some("stable"),
        subject: None,
        horizon: Some(8),
        certificate_out: Some(&cert),
        json: false,
    });
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(cli::cmd_verify(&cert, None).code, 0);
    assert_eq!(cli::cmd_verify(&cert, Some((&file, "X"))).code, 0);

    let other = scenario_file("z8-nilpotent");
    let out = cli::cmd_verify(&cert, Some((&other, "X")));
    assert_eq!(out.code, cli::EXIT_FAILS);
    assert!(out.stdout.contains("binding"), "{}", out.stdout);

    // Editing any sealed field breaks the digest.
    let mut value: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    value["horizon"] = Value::from(9);
    let tampered = dir.path().join("tampered.cert.json");
    std::fs::write(&tampered, value.to_string()).unwrap();
    let out = cli::cmd_verify(&tampered, None);
    assert_eq!(out.code, cli::EXIT_FAILS, "{}", out.stderr);

    let c = Certificate::from_json(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(c.verify().is_ok());
}

#[test]
fn json_output_lists_queries_in_document_order() {
    let out = cli::cmd_check(&CheckArgs {
        file: &scenario_file("dyadic"),
        property: None,
        subject: None,
        horizon: None,
        certificate_out: None,
        json: true,
    });
    let records: Value = serde_json::from_str(&out.stdout).unwrap();
    let ws = scenario_document("dyadic").unwrap();
    let got: Vec<&str> = records.as_array().unwrap().iter().map(|r| r["property"].as_str().unwrap()).collect();
    let want: Vec<&str> = ws.queries.iter().map(|q| q.property.name()).collect();
    assert_eq!(got, want);
}

#[test]
fn suite_command_reports_and_writes_nothing_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli::cmd_suite("snf", 20, 3, dir.path(), false);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    assert_eq!(cli::cmd_suite("bogus", 5, 1, dir.path(), false).code, cli::EXIT_USAGE);
    let a = cli::cmd_suite("finset-collapse", 30, 11, dir.path(), true);
    let b = cli::cmd_suite("finset-collapse", 30, 11, dir.path(), true);
    assert_eq!(a.code, b.code);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(procat(&["scenario", "all"]).0, 0);
    assert_eq!(procat(&["suite", "bogus"]).0, 64);
    assert_eq!(procat(&["frobnicate"]).0, 64);
    assert_eq!(procat(&["--help"]).0, 0);
    let (code, stdout, _) = procat(&["suite", "list"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), cli::suite_names().len());
    let z = scenario_file("z-to-z2");
    assert_eq!(procat(&["check", z.to_str().unwrap(), "strong-epi"]).0, 1);
    let (code, stdout, _) = procat(&["scenario", "z8-nilpotent", "--export"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, std::fs::read_to_string(scenario_file("z8-nilpotent")).unwrap());
}
