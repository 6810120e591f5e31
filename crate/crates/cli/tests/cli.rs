use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tbcodes")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn golden(name: &str, args: &[&str]) {
    let want = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap();
    assert_eq!(ok(args), want, "{name}");
}

#[test]
fn construct_prints_stabilizers_from_spec() {
    let spec = data("tb12.json");
    let out = ok(&["construct", "--spec", spec.to_str().unwrap(), "--print-stabilizers"]);
    assert!(out.contains("S_Z1 = Z1 Z3 Z8 Z10\n"));
    assert!(out.contains("S_X6 = X3 X5 X10 X12\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("S_")).count(), 12);
}

#[test]
fn distance_of_spec() {
    let spec = data("tb12.json");
    assert_eq!(ok(&["distance", "--spec", spec.to_str().unwrap()]), "d=3 exact=true\n");
}

#[test]
fn noiseless_memory_has_no_failures() {
    let spec = data("tb12.json");
    let out = ok(&["memory", "--spec", spec.to_str().unwrap(), "--p", "0", "--shots", "100", "--seed", "1"]);
    assert!(out.contains(" failures=0 "), "{out}");
}

#[test]
fn json_outputs_match_golden_files() {
    let logicals = data("tb12_logicals.txt");
    let gates = data("gates/cnot_l1_l2.txt");
    golden("construct_tb12.json", &["construct", "--code", "tb12", "--json"]);
    golden("distance_tb24.json", &["distance", "--code", "tb24", "--json"]);
    golden(
        "verify_cnot.json",
        &[
            "verify-gate", "--code", "tb12", "--logicals", logicals.to_str().unwrap(),
            "--gates", gates.to_str().unwrap(), "--claim", "CNOT:2,1", "--json",
        ],
    );
    golden("memory_noiseless.json", &["memory", "--code", "tb12", "--p", "0", "--shots", "100", "--seed", "1", "--json"]);
}

#[test]
fn circuit_sample_decode_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| dir.path().join(f).to_str().unwrap().to_string();
    ok(&["circuit", "--code", "tb12", "--p", "0.002", "--out", &p("c.txt")]);
    let s1 = ok(&["sample", "--circuit", &p("c.txt"), "--shots", "3000", "--seed", "4", "--out", &p("a.b8")]);
    assert_eq!(s1, "shots=3000 detectors=36 observables=2\n");
    ok(&["--threads", "1", "sample", "--circuit", &p("c.txt"), "--shots", "3000", "--seed", "4", "--out", &p("b.b8")]);
    let a = std::fs::read(p("a.b8")).unwrap();
    assert_eq!(a, std::fs::read(p("b.b8")).unwrap(), "thread count changed the samples");
    // 36 detectors + 2 observables pad to 5 bytes per shot.
    assert_eq!(a.len(), 3000 * 5);
    let out = ok(&["decode", "--circuit", &p("c.txt"), "--shots", &p("a.b8"), "--out", &p("f.csv"), "--graph-out", &p("g.txt")]);
    let failures: usize = out.trim().strip_prefix("shots=3000 failures=").unwrap().parse().unwrap();
    let csv = std::fs::read_to_string(p("f.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3001);
    assert_eq!(csv.lines().skip(1).filter(|l| l.ends_with(",1")).count(), failures);
    assert!(failures > 0 && failures < 100, "{failures}");
    assert!(std::fs::read_to_string(p("g.txt")).unwrap().starts_with("c basis Z"));
    let dem = ok(&["dem", "--circuit", &p("c.txt")]);
    assert!(dem.lines().all(|l| l.starts_with("error(")));
}

#[test]
fn circuit_output_is_deterministic() {
    let a = ok(&["circuit", "--code", "surface3", "--p", "0.001", "--basis", "x"]);
    assert_eq!(a, ok(&["circuit", "--code", "surface3", "--p", "0.001", "--basis", "x"]));
    assert!(a.contains("DETECTOR"));
}

#[test]
fn memory_csv_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::new();
    for code in ["surface3", "surface5", "surface7"] {
        let f = dir.path().join(format!("{code}.csv"));
        ok(&["memory", "--code", code, "--p", "0", "--shots", "10", "--csv", f.to_str().unwrap()]);
        let text = std::fs::read_to_string(&f).unwrap();
        if rows.is_empty() {
            rows.push_str(text.lines().next().unwrap());
            rows.push('\n');
        }
        rows.push_str(text.lines().nth(1).unwrap());
        rows.push('\n');
    }
    assert!(rows.starts_with("code,n,k,d,rounds,p_phys,shots,failures,p_k,p_l,ci_lo,ci_hi,seed\n"));
    let all = dir.path().join("all.csv");
    std::fs::write(&all, rows).unwrap();
    let out = ok(&["fit", "--csv", all.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["beta"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["points"], 3);
}

#[test]
fn logicals_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("l.txt");
    std::fs::write(&f, ok(&["logicals", "--code", "tb24"])).unwrap();
    assert_eq!(ok(&["logicals", "--code", "tb24", "--logicals", f.to_str().unwrap()]), "valid=true\n");
    let reference = data("tb12_logicals.txt");
    assert_eq!(ok(&["logicals", "--code", "tb12", "--logicals", reference.to_str().unwrap()]), "valid=true\n");
}

#[test]
fn failed_gate_check_exits_one() {
    let logicals = data("tb12_logicals.txt");
    let gates = data("gates/s_l1.txt");
    let o = run(&[
        "verify-gate", "--code", "tb12", "--logicals", logicals.to_str().unwrap(),
        "--gates", gates.to_str().unwrap(), "--claim", "S:2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("matches=false"));
    assert_eq!(stderr(&o), "error: validation: sequence does not implement S:2\n");
}

#[test]
fn search_is_deterministic() {
    let args = ["search", "--l", "2", "--m", "3", "--trials", "40", "--min-k", "2", "--min-d", "3", "--seed", "5"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    assert!(a.lines().all(|l| l.starts_with("[[12,2,3]]")), "{a}");
}

#[test]
fn error_records_and_exit_codes() {
    let o = run(&["construct", "--code", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o), "error: validation: unknown built-in code 'nope'\n");

    let o = run(&["construct", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));

    let o = run(&["memory", "--code", "tb12", "--p", "1.5", "--shots", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: validation: "));

    // A detector on a random outcome breaks the sampler contract.
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.txt");
    std::fs::write(&c, "R 0\nH 0\nM 0\nDETECTOR rec[-1]\n").unwrap();
    let out = dir.path().join("s.b8");
    let o = run(&["sample", "--circuit", c.to_str().unwrap(), "--shots", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: contract: "));

    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
