use std::path::PathBuf;
use std::process::Command as Process;

use serde_json::Value;
use zerorate::cli::{render, run};
use zerorate::report::CommandResult;
use zerorate::schema::{document_schema, COMMANDS};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn go(args: &[&str]) -> CommandResult {
    let mut argv = vec!["zerorate".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn document(r: &CommandResult) -> Value {
    serde_json::from_str(&render(r)).unwrap()
}

fn assert_valid(r: &CommandResult) {
    let schema = document_schema(&r.command).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let doc = document(r);
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{}: {errors:?}\n{doc:#}", r.command);
}

/// One invocation per command, against the shipped fixtures.
fn every_command(dir: &std::path::Path) -> Vec<Vec<String>> {
    let ex1 = fixture("typewriter.json");
    let bsc = fixture("bsc.json");
    let one = fixture("single_letter.code");
    let two = fixture("two_words.code");
    let r16 = fixture("random16.code");
    let csv = dir.join("mu.csv").display().to_string();
    let curve = dir.join("curve.csv").display().to_string();
    let v = |a: &[&str]| a.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        v(&["validate", "--pair", &ex1]),
        v(&["zero-error", "--pair", &ex1]),
        v(&["balanced", "--pair", &ex1]),
        v(&["exponent", "--pair", &bsc, "--curve", &curve, "--curve-points", "9"]),
        v(&["exponent", "--pair", &ex1, "--bits"]),
        v(&["gap", "--pair", &ex1]),
        v(&["mu-curve", "--pair", &ex1, "--csv", &csv, "--s", "0,0.5,1,2"]),
        v(&["mu-curve", "--pair", &bsc, "--points", "3"]),
        v(&["dmin", "--pair", &bsc, "--code", &r16]),
        v(&["komlos", "--code", &r16, "--t", "4", "--target", "4"]),
        v(&["certificate", "--pair", &bsc, "--code", &r16, "--t", "4", "--target", "4"]),
        v(&["exact-pe", "--pair", &bsc, "--code", &two, "--ties", "error"]),
        v(&["exact-pe", "--pair", &ex1, "--code", &one]),
        v(&["simulate", "--pair", &bsc, "--code", &r16, "--trials", "5000", "--seed", "3"]),
        v(&["empirical", "--pair", &bsc, "--letters", "0,1", "--n", "2,4"]),
    ]
}

#[test]
fn example_one_reports() {
    let ex1 = fixture("typewriter.json");
    let z = go(&["zero-error", "--pair", &ex1]).payload;
    assert_eq!(z["c0bar_zero"], true);
    assert_eq!(z["c0_zero"], true);
    assert_eq!(z["boundary_pairs"], serde_json::json!([[0, 1], [0, 2], [1, 0], [2, 0]]));

    let b = go(&["balanced", "--pair", &ex1]).payload;
    assert_eq!(b["balanced"], false);
    let v = &b["violation"];
    assert_eq!((v["a"].as_u64(), v["b"].as_u64()), (Some(0), Some(1)));
    // 2(1-eps)/eps and eps/(1-eps) at eps = 1/10
    assert_eq!(v["ratio1"], "18");
    assert_eq!(v["ratio2"], "1/9");

    let g = go(&["gap", "--pair", &ex1]).payload;
    assert!((g["gap"].as_f64().unwrap() - 0.5 * 10f64.ln()).abs() < 1e-9);
    let gb = go(&["gap", "--pair", &ex1, "--bits"]).payload;
    assert!((gb["gap"].as_f64().unwrap() - 0.5 * 10f64.log2()).abs() < 1e-9);
}

#[test]
fn every_document_matches_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for args in every_command(dir.path()) {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = go(&refs);
        assert_valid(&r);
        seen.insert(r.command.clone());
    }
    assert_eq!(seen.len(), COMMANDS.len());
    let mu = std::fs::read_to_string(dir.path().join("mu.csv")).unwrap();
    assert!(mu.starts_with("a,b,s,mu,mu_prime\n"));
    // six ordered pairs times four s values
    assert_eq!(mu.lines().count(), 1 + 6 * 4);
    let curve = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("s,objective"));
    assert_eq!(curve.lines().count(), 10);
}

#[test]
fn commands_are_pure() {
    let dir = tempfile::tempdir().unwrap();
    for args in every_command(dir.path()) {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (go(&refs), go(&refs));
        assert_eq!(a.payload, b.payload, "{args:?}");
        assert_eq!(a.input_digest, b.input_digest);
    }
}

#[test]
fn worker_count_and_output_paths_do_not_change_results() {
    let bsc = fixture("bsc.json");
    let code = fixture("random16.code");
    let base = ["simulate", "--pair", &bsc, "--code", &code, "--trials", "20000", "--seed", "11"];
    let one = go(&base);
    let mut four: Vec<&str> = base.to_vec();
    four.extend(["--jobs", "4"]);
    let four = go(&four);
    assert_eq!(one.payload, four.payload);
    assert_eq!(one.input_digest, four.input_digest);
    let mut other_seed: Vec<&str> = base.to_vec();
    other_seed[8] = "12";
    assert_ne!(go(&other_seed).input_digest, one.input_digest);
}

#[test]
fn exact_and_simulated_single_letter() {
    let bsc = fixture("bsc.json");
    let one = fixture("single_letter.code");
    let e = go(&["exact-pe", "--pair", &bsc, "--code", &one]).payload;
    assert_eq!(e["per_message_exact"], serde_json::json!(["1/4", "1/4"]));
    let s = go(&["simulate", "--pair", &bsc, "--code", &one, "--trials", "100000"]).payload;
    let iv = s["interval"].as_array().unwrap();
    assert!(iv[0].as_f64().unwrap() <= 0.25 && 0.25 <= iv[1].as_f64().unwrap());
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_zerorate")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn exit_codes() {
    let (code, stdout, _) = binary(&["zero-error", "--pair", &fixture("typewriter.json")]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["payload"]["c0bar_zero"], true);

    assert_eq!(binary(&["frobnicate"]).0, 2);
    assert_eq!(binary(&["validate", "--pair", "/nonexistent/pair.json"]).0, 2);
    let (code, _, err) = binary(&["validate", "--pair", &fixture("inadmissible.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("(0, 0)"), "{err}");
    // Positive zero-error capacity: the exponent is infinite.
    assert_eq!(binary(&["exponent", "--pair", &fixture("noiseless.json")]).0, 3);
    assert_eq!(binary(&["gap", "--pair", &fixture("noiseless.json")]).0, 3);
    assert_eq!(binary(&["empirical", "--pair", &fixture("bsc.json"), "--letters", "1,1"]).0, 3);
    assert_eq!(binary(&["--help"]).0, 0);
}

#[test]
fn out_flag_writes_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("doc.json");
    let (code, stdout, _) = binary(&["gap", "--pair", &fixture("typewriter.json"), "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["command"], "gap");
}
