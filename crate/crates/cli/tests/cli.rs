use std::process::{Command, Output};

use serde_json::Value;

fn podlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_podlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--no-meta"]);
    serde_json::from_str(&stdout(&podlab(&all))).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("podlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn series_text_lists_every_coefficient() {
    let o = podlab(&["series", "--ell", "3", "--terms", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# modulus=Z order=10"));
    let values: Vec<&str> = lines.map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(values, ["1", "1", "1", "1", "2", "3", "3", "4", "6", "7"]);
}

#[test]
fn series_mod_reduces() {
    let v = json(&["series", "--ell", "3", "--terms", "10", "--mod", "3"]);
    let coeffs: Vec<&str> = v["result"]["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(coeffs, ["1", "1", "1", "1", "2", "0", "0", "1", "0", "1"]);
    assert_eq!(v["schema"], 1);
    assert!(v.get("meta").is_none());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(podlab(&["series", "--ell", "1", "--terms", "5"]).status.code(), Some(2));
    assert_eq!(podlab(&["hecke", "--m", "0"]).status.code(), Some(2));
    assert_eq!(podlab(&["verify"]).status.code(), Some(2));
}

#[test]
fn eta_check_eigenform() {
    let v = json(&["eta-check", "--spec", "4:2,16:2,8:-2@64"]);
    assert_eq!(v["result"]["weight"], "1/1");
    assert_eq!(v["result"]["holomorphic"], true);
    assert_eq!(v["ok"], true);
}

#[test]
fn eta_check_b_family_level() {
    let v = json(&["eta-check", "--family", "B", "--ell", "3", "--p", "3", "--k", "2"]);
    assert_eq!(v["result"]["level"], 1152);
    assert_eq!(v["result"]["family"]["expectedWeight"], "9/1");
    let v = json(&["eta-check", "--family", "B", "--ell", "5", "--p", "5", "--k", "2", "--level", "1920"]);
    assert_eq!(v["result"]["level"], 1920);
    assert_eq!(v["result"]["condition24_down"], true);
}

#[test]
fn eta_check_parse_error_has_position() {
    let o = podlab(&["eta-check", "--spec", "4:2,16x2@64"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 4"));
}

#[test]
fn non_holomorphic_quotient_exits_1() {
    let o = podlab(&["eta-check", "--family", "B", "--ell", "15", "--p", "3", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("holomorphic       false"));
}

#[test]
fn verify_builtins_pass() {
    let o = podlab(&["verify", "--builtin", "gireesh", "--n", "300"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3/3 families pass"));
    let o = podlab(&["verify", "--builtin", "pod7", "--n", "5000"]);
    assert!(o.status.success());
    for tag in ["veena", "thm2", "cor2", "cor3", "pod5", "podp"] {
        assert!(podlab(&["verify", "--builtin", tag]).status.success(), "{tag}");
    }
}

#[test]
fn cor3_example_reports_both_readings() {
    let v = json(&["verify", "--builtin", "cor3-example"]);
    let fams = v["result"]["families"].as_array().unwrap();
    assert_eq!(fams[0]["passed"], true);
    assert_eq!(fams[1]["passed"], false);
    assert_eq!(fams[1]["counterexample"]["n"], 0);
}

#[test]
fn failing_family_file_exits_1_with_counterexample() {
    let path = tmp("bad.json");
    std::fs::write(
        &path,
        r#"{"ell":3,"lhsA":9,"lhsB":2,"rhsA":1,"rhsB":0,"sign":1,"modulus":81,"tag":"corrupted"}"#,
    )
    .unwrap();
    let o = podlab(&["verify", "--file", path.to_str().unwrap(), "--n", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample n="));
}

#[test]
fn family_file_array_passes() {
    let path = tmp("good.json");
    std::fs::write(
        &path,
        r#"[{"ell":3,"lhsA":9,"lhsB":2,"rhsA":1,"rhsB":0,"sign":1,"modulus":9,"tag":"a"},
            {"ell":3,"lhsA":27,"lhsB":20,"rhsA":3,"rhsB":2,"sign":1,"modulus":27,"tag":"b"}]"#,
    )
    .unwrap();
    let o = podlab(&["verify", "--file", path.to_str().unwrap()]);
    assert!(o.status.success());
    let bad = tmp("invalid.json");
    std::fs::write(&bad, r#"{"ell":3,"lhsA":9,"lhsB":2,"rhsA":1,"rhsB":0,"sign":3,"modulus":9,"tag":"x"}"#).unwrap();
    assert_eq!(podlab(&["verify", "--file", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn hecke_eigenvalues() {
    let o = podlab(&["hecke", "--m", "3", "--terms", "2000"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("eigenvalue 0"));
    let v = json(&["hecke", "--m", "5", "--terms", "2000"]);
    assert_eq!(v["result"]["eigenvalue"], -2);
    assert_eq!(podlab(&["hecke", "--m", "101", "--terms", "2000"]).status.code(), Some(1));
}

#[test]
fn density_table_and_json() {
    let o = podlab(&["density", "--ell", "3", "--mod", "3", "--cutoffs", "10,100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    let v = json(&["density", "--ell", "3", "--mod", "1", "--cutoffs", "10"]);
    assert_eq!(v["result"]["ratios"][0], "1/1");
    assert_eq!(podlab(&["density", "--ell", "3", "--mod", "3", "--residue", "3", "--cutoffs", "10"]).status.code(), Some(2));
}

#[test]
fn json_is_deterministic_without_meta() {
    let args = ["verify", "--builtin", "gireesh", "--format", "json", "--no-meta"];
    assert_eq!(podlab(&args).stdout, podlab(&args).stdout);
    let with_meta: Value = serde_json::from_str(&stdout(&podlab(&["hecke", "--m", "3", "--format", "json"]))).unwrap();
    assert!(with_meta["meta"]["timestamp"].is_u64());
    assert_eq!(with_meta["meta"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn output_flag_writes_file() {
    let path = tmp("series.txt");
    let o = podlab(&["series", "--ell", "5", "--terms", "4", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("# modulus=Z order=4"));
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let run = |val: &str| {
        Command::new(env!("CARGO_BIN_EXE_podlab"))
            .args(["verify", "--builtin", "gireesh", "--n", "50"])
            .env("PODLAB_THREADS", val)
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    assert_eq!(run("zero").status.code(), Some(2));
}
