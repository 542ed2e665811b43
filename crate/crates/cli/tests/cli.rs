use assert_cmd::Command;
use serde_json::Value;

fn gess() -> Command {
    Command::cargo_bin("gess").unwrap()
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json_of(cmd: &mut Command) -> Value {
    let out = cmd.output().unwrap();
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn certify_three_qubits() {
    let v = json_of(gess().args(["--json", "certify", "--n", "3"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["beta_c"]["exact"], "3");
    assert_eq!(v["face_dimension"], 0);
    assert!((v["beta_q"]["value"].as_f64().unwrap() - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn certify_seven_qubits() {
    let v = json_of(gess().args(["--json", "--trials", "5", "certify", "--n", "7"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["k_min"], 4);
    assert_eq!(v["beta_c"]["exact"], "4");
    assert_eq!(v["face_dimension"], 7);
    let stages: Vec<&str> = v["stages"].as_array().unwrap().iter().map(|s| s["status"].as_str().unwrap()).collect();
    assert!(stages.iter().all(|&s| s == "pass"));
}

#[test]
fn certify_beyond_dense_limit_skips_numerics() {
    let v = json_of(gess().args(["--json", "certify", "--n", "40"]));
    assert_eq!(v["passed"], true);
    let skipped = v["stages"].as_array().unwrap().iter().filter(|s| s["status"] == "skipped").count();
    assert_eq!(skipped, 4);
}

#[test]
fn shor_code_is_not_gme() {
    let out = gess().args(["check-gme", &data("shor9.txt")]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("not GME"));
    gess().args(["check-gme", "--require-gme", &data("shor9.txt")]).assert().code(2);
}

#[test]
fn five_qubit_code_is_gme() {
    gess().args(["check-gme", "--file", &data("five_qubit.txt")]).assert().success();
    let v = json_of(gess().args(["--json", "check-gme", &data("five_qubit.txt")]));
    assert_eq!(v["gme"]["rank_criterion"], true);
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "XX\nZ1\n").unwrap();
    gess().args(["check-gme", p.to_str().unwrap()]).assert().code(2);
    std::fs::write(&p, "XQ\n").unwrap();
    gess().args(["check-gme", p.to_str().unwrap()]).assert().code(2);
}

#[test]
fn io_and_usage_errors_exit_1() {
    gess().args(["check-gme", "/nonexistent/file.txt"]).assert().code(1);
    gess().args(["frobnicate"]).assert().code(1);
    gess().args(["--dense-limit", "0", "certify", "--n", "3"]).assert().code(1);
}

#[test]
fn resource_limit_exits_4() {
    gess().args(["--dense-limit", "4", "faces", "--n", "7"]).assert().code(4);
    gess().args(["--brute-limit", "3", "bell", "classical", "--family", "max", "--n", "5"]).assert().code(4);
}

#[test]
fn tampered_bound_exits_3() {
    let out = gess().args(["bell", "synth", "--family", "max", "--n", "4"]).output().unwrap();
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("expr.json");
    std::fs::write(&p, v.to_string()).unwrap();
    gess().args(["bell", "classical", "--file", p.to_str().unwrap()]).assert().success();
    gess().args(["bell", "quantum", "--file", p.to_str().unwrap()]).assert().success();

    v["classical_bound"] = serde_json::json!({"a": "5", "b": "0"});
    v["quantum_bound"] = serde_json::json!({"a": "5", "b": "1"});
    std::fs::write(&p, v.to_string()).unwrap();
    gess().args(["bell", "classical", "--file", p.to_str().unwrap()]).assert().code(3);
    gess().args(["bell", "quantum", "--file", p.to_str().unwrap()]).assert().code(3);
}

#[test]
fn construct_outputs_parse_back() {
    let out = gess().args(["construct", "c2", "--n", "6", "--cyclic"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), ["+XXXXXX", "+ZZX11X", "+1XZZX1", "+X11XZZ"]);
    let out = gess().args(["construct", "h", "--n", "7"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn sos_and_selftest_pass() {
    gess().args(["--trials", "4", "bell", "sos", "--family", "max", "--n", "4", "--local-dim", "4"]).assert().success();
    gess().args(["selftest", "verify", "--n", "5"]).assert().success();
    gess().args(["bell", "sos", "--family", "cyclic", "--n", "5"]).assert().code(2);
}
