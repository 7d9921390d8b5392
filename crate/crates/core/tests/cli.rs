//! End-to-end runs of the `weakseq` binary: exit codes, stream separation,
//! golden outputs and schema validation.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under `tests/golden/`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weakseq"));
    cmd.env_remove("WEAKSEQ_MEM_CAP").env_remove("WEAKSEQ_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}\nstderr:\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn validate(schema: &str, value: &Value) {
    let path = workspace_root().join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{} violates {schema}: {errors:?}", value);
}

/// Compare with `tests/golden/<name>.json`, ignoring timing fields.
fn golden(name: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"));
    let mut value = value.clone();
    strip_timing(&mut value);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap() + "\n").unwrap();
        return;
    }
    let expected: Value = serde_json::from_str(
        &std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display())),
    )
    .unwrap();
    assert_eq!(value, expected, "golden mismatch for {name}");
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("seconds");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn expect(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_clean_and_dirty() {
    let out = run(&["verify", "--n", "7", "--set", "1,3,2", "--t", "2"]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("verify", &v);
    assert_eq!(v["violations"], serde_json::json!([]));
    golden("verify_clean", &v);

    let out = run(&["verify", "--n", "7", "--set", "1,6,2", "--t", "2"]);
    expect(&out, 1);
    let v = json_of(&out);
    validate("verify", &v);
    assert_eq!(v["violations"], serde_json::json!([[0, 2]]));
    assert_eq!(v["class"], "neither");
}

#[test]
fn verify_accepts_negative_residues() {
    let out = run(&["verify", "--n", "11", "--set", "-1,3,-4", "--t", "2"]);
    expect(&out, 0);
    assert_eq!(json_of(&out)["ordering"], serde_json::json!([10, 3, 7]));
}

#[test]
fn coeff_known_value() {
    let out = run(&["coeff", "--family", "Q", "--t", "2", "--ell", "3", "--monomial", "2,2,2"]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("coeff", &v);
    assert_eq!(v["coefficient"], "-1");
    golden("coeff_q23", &v);
    // Timing goes to stderr only.
    assert!(String::from_utf8_lossy(&out.stderr).contains("computed in"));
}

#[test]
fn build_dump_then_coeff_from_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("q.json");
    let out = run(&[
        "build", "--family", "Q", "--t", "3", "--ell", "4", "--dump",
        dump.to_str().unwrap(),
    ]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("build", &v);
    golden("build_q34", &v);
    let degree = v["degree"].as_u64().unwrap();
    assert_eq!(degree, 6 + 5 + 3);

    let from_family = run(&[
        "coeff", "--family", "Q", "--t", "3", "--ell", "4", "--monomial", "2,3,3,6",
        "--algorithm", "baseline",
    ]);
    let from_dump = run(&[
        "coeff", "--system", dump.to_str().unwrap(), "--monomial", "2,3,3,6",
    ]);
    expect(&from_family, 0);
    expect(&from_dump, 0);
    let a = json_of(&from_family);
    let b = json_of(&from_dump);
    validate("coeff", &b);
    assert_eq!(a["coefficient"], b["coefficient"]);
    assert_eq!(b["family"], Value::Null);
}

#[test]
fn search_methods() {
    let out = run(&["search", "--n", "13", "--set", "1,2,3,4,5,6", "--t", "4"]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("search", &v);
    golden("search_backtrack", &v);

    let out = run(&[
        "search", "--n", "13", "--set", "1,2,3,4,5,6", "--t", "3", "--method", "greedy",
        "--h", "4",
    ]);
    expect(&out, 0);
    validate("search", &json_of(&out));

    let out = run(&[
        "search", "--n", "31", "--set", "1,2,3,4,5,6,7,8,9", "--t", "5", "--method",
        "low-collision", "--seed", "9",
    ]);
    let v = json_of(&out);
    validate("search", &v);
    assert_eq!(v["seed"], 9);
    golden("search_low_collision", &v);

    // Randomized methods insist on a seed.
    let out = run(&[
        "search", "--n", "31", "--set", "1,2,3,4,5", "--t", "3", "--method", "low-collision",
    ]);
    expect(&out, 2);
    validate("error", &json_of(&out));
}

#[test]
fn search_budget_exhaustion_is_a_resource_error() {
    let out = run(&[
        "search", "--n", "101", "--set", "1,2,3,4,5,6,7,8,9,10,11,12,13,14", "--t", "13",
        "--budget", "3",
    ]);
    expect(&out, 3);
    let v = json_of(&out);
    validate("search", &v);
    assert_eq!(v["status"], "budget_exhausted");
}

#[test]
fn construct_t3_output() {
    let out = run(&["construct-t3", "--n", "29", "--set", "1,2,3,5,8,13,21,27,28"]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("search", &v);
    assert_eq!(v["violations"], serde_json::json!([]));
    golden("construct_t3", &v);

    let out = run(&["construct-t3", "--n", "29", "--set", "1,2,3"]);
    expect(&out, 2);
}

#[test]
fn exhaust_reports_progress_on_stderr() {
    let out = run(&["exhaust", "--n", "11", "--t", "3", "--k", "4..6"]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("exhaust", &v);
    assert_eq!(v["status"], "all_sequenceable");
    golden("exhaust_11_3", &v);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("k = ")).count(), 3);
}

#[test]
fn certify_appends_and_theorem_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("certs.json");
    let f = file.to_str().unwrap();
    let universal = ["--variant", "main", "--t", "2", "--ell", "3", "--k-min", "4"];
    let out = run(&[&["certify"], &universal[..], &["--monomial", "2,2,2", "--out", f]].concat());
    expect(&out, 0);
    let cert = json_of(&out);
    validate("certificate", &cert);
    assert_eq!(cert["coefficient"], "-1");
    golden("certify_universal", &cert);

    let out = run(&[
        "certify", "--variant", "main", "--t", "2", "--ell", "3", "--k", "5", "--monomial",
        "2,2,2", "--out", f, "--append",
    ]);
    expect(&out, 0);
    let text = std::fs::read_to_string(&file).unwrap();
    let stored: Value = serde_json::from_str(&text).unwrap();
    validate("certificates", &stored);
    assert_eq!(stored.as_array().unwrap().len(), 2);

    let out = run(&["theorem", "--variant", "main", "--t", "2", "--certs", f]);
    expect(&out, 0);
    let v = json_of(&out);
    validate("theorem", &v);
    assert_eq!(v["verdict"], "complete");
}

#[test]
fn certify_errors_have_distinct_exit_codes() {
    // Exponent above ell - 1.
    let out = run(&[
        "certify", "--variant", "main", "--t", "2", "--ell", "3", "--k-min", "4", "--monomial",
        "3,2,1",
    ]);
    expect(&out, 2);
    let v = json_of(&out);
    validate("error", &v);
    assert!(v["error"]["message"].as_str().unwrap().contains("exponent"));

    // A zero coefficient is a negative result, not a usage error.
    let out = run(&[
        "certify", "--variant", "main", "--t", "2", "--ell", "5", "--k-min", "6", "--monomial",
        "0,3,4,4,4",
    ]);
    expect(&out, 1);
    let v = json_of(&out);
    validate("error", &v);
    assert_eq!(v["error"]["kind"], "negative");

    // Both --k and --k-min.
    let out = run(&[
        "certify", "--variant", "main", "--t", "2", "--ell", "3", "--k", "4", "--k-min", "4",
        "--monomial", "2,2,2",
    ]);
    expect(&out, 2);
}

#[test]
fn theorem_with_stored_tables() {
    for (variant, t, name) in [("main", "6", "theorem_main6"), ("cmpp", "7", "theorem_cmpp7")] {
        let out = run(&["theorem", "--variant", variant, "--t", t, "--builtin"]);
        expect(&out, 0);
        let v = json_of(&out);
        validate("theorem", &v);
        assert_eq!(v["verdict"], "complete");
        golden(name, &v);
    }
}

#[test]
fn theorem_from_table_certificate_file() {
    let dir = tempfile::tempdir().unwrap();
    let certs = dir.path().join("tables12.json");
    let csv = dir.path().join("tables12.csv");
    let out = run(&[
        "reproduce-tables", "--variant", "main", "--t", "6", "--tier", "full", "--csv",
        csv.to_str().unwrap(), "--certs-out", certs.to_str().unwrap(),
    ]);
    expect(&out, 0);
    let report = json_of(&out);
    validate("tables", &report);
    golden("tables_main6_full", &report);
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&certs).unwrap()).unwrap();
    validate("certificates", &stored);

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,ell,deg,monomial,coefficient"));
    assert_eq!(lines.count(), 9);

    let out = run(&[
        "theorem", "--variant", "main", "--t", "6", "--certs", certs.to_str().unwrap(),
    ]);
    expect(&out, 0);
    assert_eq!(json_of(&out)["verdict"], "complete");
}

#[test]
fn theorem_with_missing_certificates_is_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("only_exact.json");
    let out = run(&[
        "certify", "--variant", "main", "--t", "2", "--ell", "3", "--k", "4", "--monomial",
        "2,2,2", "--out", file.to_str().unwrap(),
    ]);
    expect(&out, 0);
    let out = run(&[
        "theorem", "--variant", "main", "--t", "2", "--certs", file.to_str().unwrap(),
    ]);
    expect(&out, 1);
    let v = json_of(&out);
    validate("theorem", &v);
    assert_eq!(v["verdict"], "incomplete");
    assert!(!v["gaps"].as_array().unwrap().is_empty());
}

#[test]
fn reproduce_tables_csv_on_stdout() {
    let out = run(&["reproduce-tables", "--variant", "cmpp", "--t", "7"]);
    expect(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "k,ell,deg,monomial,coefficient");
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().any(|r| r.ends_with("13*67*451441944254443")));
    let out = run(&["reproduce-tables", "--variant", "main", "--t", "5"]);
    expect(&out, 2);
}

#[test]
fn montecarlo_reports() {
    let args = ["montecarlo", "--n", "101", "--k", "10", "--t", "3", "--trials", "20000", "--seed", "17"];
    let a = run(&args);
    let b = bin().args(args).env("WEAKSEQ_THREADS", "1").output().unwrap();
    let va = json_of(&a);
    validate("montecarlo", &va);
    assert_eq!(va, json_of(&b), "thread count changed the result");
    assert_eq!(va["seed"], 17);
    golden("montecarlo_101_10_3", &va);
    let code = if va["bound_satisfied"] == true { 0 } else { 1 };
    expect(&a, code);

    let out = run(&["montecarlo", "--n", "13", "--set", "1,2,3,4,5", "--t", "2", "--exact"]);
    let v = json_of(&out);
    validate("montecarlo", &v);
    assert_eq!(v["exact"], true);
    assert_eq!(v["estimate"], 0.0);

    let out = run(&["montecarlo", "--n", "101", "--k", "10", "--t", "3"]);
    expect(&out, 2);
}

#[test]
fn usage_errors() {
    for args in [
        &["bogus"][..],
        &["verify", "--n", "7", "--set", "1,2"][..],
        &["verify", "--n", "7", "--set", "1,2", "--t", "2", "--unknown"][..],
        &["verify", "--n", "7", "--set", "1,1,2", "--t", "2"][..],
        &["verify", "--n", "7", "--set", "1,0,2", "--t", "2"][..],
        &["verify", "--n", "7", "--set", "1,2,3", "--t", "3"][..],
        &["coeff", "--family", "Nope", "--t", "2", "--ell", "3", "--monomial", "1"][..],
        &["exhaust", "--n", "11", "--t", "2", "--k", "6..4"][..],
    ] {
        let out = run(args);
        expect(&out, 2);
        validate("error", &json_of(&out));
        assert!(!out.stderr.is_empty(), "{args:?} printed no diagnostic");
    }
    let out = run(&["--help"]);
    expect(&out, 0);
}

#[test]
fn memory_cap_from_environment() {
    let args = [
        "coeff", "--family", "Htop", "--k", "16", "--t", "6", "--ell", "12", "--monomial",
        "5,10,11,11,11,11,11,11,11,11,11,11",
    ];
    let out = bin().args(args).env("WEAKSEQ_MEM_CAP", "64K").output().unwrap();
    expect(&out, 3);
    let v = json_of(&out);
    validate("error", &v);
    assert_eq!(v["error"]["kind"], "resource");
    let out = run(&[&args[..], &["--mem-cap", "1K"]].concat());
    expect(&out, 3);
}
