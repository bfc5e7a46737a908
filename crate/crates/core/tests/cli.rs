use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ribbon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ribbon"))
        .current_dir(data(""))
        .args(args)
        .output()
        .expect("failed to spawn ribbon")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Compare stdout with `data/golden/<name>.txt`; `RIBBON_BLESS=1` rewrites it.
fn assert_golden(name: &str, args: &[&str], expected_code: i32) {
    let out = ribbon(args);
    assert_eq!(code(&out), expected_code, "{args:?}\nstderr:\n{}", String::from_utf8_lossy(&out.stderr));
    let path = data("golden").join(format!("{name}.txt"));
    if std::env::var_os("RIBBON_BLESS").is_some() {
        fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(stdout(&out), expected, "stdout of {args:?} differs from {}", path.display());
}

#[test]
fn invariants_golden() {
    assert_golden("invariants_z3", &["invariants", "z3.json"], 0);
    assert_golden("invariants_trivial", &["invariants", "trivial.json"], 0);
    assert_golden("invariants_free_coupled", &["invariants", "free_coupled.json"], 0);
}

#[test]
fn eta_golden() {
    assert_golden(
        "eta_z3",
        &["eta", "z3.json", "--character", "3:1", "--bounding", "bounding_z3.json", "--obstruction"],
        1,
    );
    assert_golden("eta_trivial", &["eta", "trivial.json", "--character", "5:", "--obstruction"], 0);
}

#[test]
fn move_check_golden() {
    assert_golden("move_check_z3", &["move-check", "triple_z3.json"], 0);
}

#[test]
fn summary_lines() {
    let out = ribbon(&["invariants", "z3.json"]);
    assert!(stdout(&out).contains("Tor = Z/3; τ = -1; λ(g,g) = 1/3\n"));
    let out = ribbon(&["invariants", "trivial.json"]);
    assert!(stdout(&out).contains("Tor = 0; pairing trivial\n"));
}

#[test]
fn compare_verdicts() {
    let cases: &[(&str, &str, i32, &str)] = &[
        ("z5.json", "z5_twin.json", 0, "EQUIVALENT"),
        ("z3.json", "z5.json", 1, "NOT EQUIVALENT"),
        ("fl_z5_a.json", "fl_z5_b.json", 0, "EQUIVALENT"),
        ("fl_z5_a.json", "fl_z5_c.json", 1, "NOT EQUIVALENT"),
        ("module_plus.json", "module_minus.json", 1, "NOT ISOMORPHIC"),
        ("module_plus.json", "module_plus.json", 0, "ISOMORPHIC"),
    ];
    for &(a, b, c, verdict) in cases {
        let out = ribbon(&["compare", a, b]);
        assert_eq!(code(&out), c, "{a} vs {b}");
        assert_eq!(stdout(&out).lines().next(), Some(verdict), "{a} vs {b}");
    }
    let out = ribbon(&["compare", "z3.json", "z3.json"]);
    assert_eq!(stdout(&out), "EQUIVALENT\nwitness = [[1]]\n");
    let out = ribbon(&["compare", "fl_z5_a.json", "fl_z5_b.json"]);
    assert!(stdout(&out).contains("witness = [[2]]") || stdout(&out).contains("witness = [[3]]"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ribbon(&["compare", "module_big.json", "module_big.json"])), 4);
    assert_eq!(code(&ribbon(&["compare", "module_big.json", "module_big.json", "--max-aut", "2048"])), 0);
    assert_eq!(code(&ribbon(&["invariants", "no_such_file.json"])), 2);
    assert_eq!(code(&ribbon(&["invariants", "torus.json"])), 2);
    assert_eq!(code(&ribbon(&["frobnicate"])), 2);
    assert_eq!(code(&ribbon(&["eta", "z3.json", "--character", "3:1"])), 3);
    assert_eq!(code(&ribbon(&["eta", "z3.json", "--character", "4:1", "--bounding", "bounding_z3.json"])), 3);
    assert_eq!(code(&ribbon(&["eta", "z3.json", "--character", "x"])), 2);
    assert_eq!(code(&ribbon(&["cocycle", "rp2.json"])), 1);
    assert_eq!(code(&ribbon(&["cocycle", "torus.json", "--degrees", "1,2,3"])), 3);
}

#[test]
fn malformed_input_is_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"format_version\": 1, \"kind\": \"seifert_bundle\"").unwrap();
    assert_eq!(code(&ribbon(&["invariants", bad.to_str().unwrap()])), 2);
    let unknown = dir.path().join("unknown.json");
    let text = fs::read_to_string(data("z3.json")).unwrap().replace("\"iota\"", "\"colour\": 1, \"iota\"");
    fs::write(&unknown, text).unwrap();
    assert_eq!(code(&ribbon(&["invariants", unknown.to_str().unwrap()])), 2);
}

#[test]
fn invalid_bundle_is_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("asym.json");
    let text = fs::read_to_string(data("free_coupled.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["payload"]["linking_matrix"] = serde_json::json!([[3, 1], [0, 1]]);
    fs::write(&p, v.to_string()).unwrap();
    let out = ribbon(&["invariants", p.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("linking matrix not symmetric"));
}

#[test]
fn cocycle_outputs() {
    let out = ribbon(&["cocycle", "torus.json", "--degrees", "2,-5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("periods [2, -5]"));
    let out = ribbon(&["cocycle", "rp2.json"]);
    assert!(stdout(&out).contains("NO EXTENSION"));
    assert_eq!(code(&ribbon(&["cocycle", "circle.json"])), 0);
}

#[test]
fn selftest_is_deterministic_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let a = ribbon(&["selftest", "--seed", "3", "--count", "12", "--out", d]);
    let b = ribbon(&["selftest", "--seed", "3", "--count", "12", "--out", d]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("module witnesses: 12/12"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0, "no counterexamples expected");
}

#[test]
fn move_check_rejects_mismatched_decoration() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("triple_z3.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["payload"]["decoration"]["pos_lt"] = serde_json::json!([2, 2]);
    let p = dir.path().join("t.json");
    fs::write(&p, v.to_string()).unwrap();
    let out = ribbon(&["move-check", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("torsion components of A differ"));
}
