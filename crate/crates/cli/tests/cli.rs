use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn cy3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cy3"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report on stdout")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn synth(dir: &Path, extra: &[&str]) -> PathBuf {
    let path = dir.join("crystal.json");
    let mut args = vec!["crystal", "synth", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = cy3(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn family(name: &str, ops: Value, kappa_den: Value, degree: u32) -> Value {
    json!({
        "name": name,
        "pf_operator": ops,
        "kappa": {"num": [1], "den": kappa_den},
        "normalization": 1,
        "primes": [2, 3, 5],
        "degree": degree,
    })
}

#[test]
fn synth_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(dir.path(), &["--seed", "7", "--h", "1", "--p", "5", "--prec", "8", "--deg", "6"]);
    let o = cy3(&["crystal", "verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout_json(&o);
    assert_eq!(report["pass"], true);
    assert_eq!(report["verdicts"]["pairing"]["pass"], true);
    assert_eq!(report["data"]["seed"], 7);
}

#[test]
fn flipped_gramm_sign_fails_pairing() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(dir.path(), &["--seed", "7", "--h", "1"]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["J"]["antidiagonal_signs"][1] = json!(-1);
    let flipped = write(dir.path(), "flipped.json", &v);
    let o = cy3(&["crystal", "verify", flipped.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let pairing = &stdout_json(&o)["verdicts"]["pairing"];
    assert_eq!(pairing["pass"], false);
    assert!(pairing["location"]["row"].is_u64());
}

#[test]
fn no_parameter_instance_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(dir.path(), &["--h", "0", "--seed", "3"]);
    let o = cy3(&["crystal", "verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report = stdout_json(&o);
    assert_eq!(report["data"]["h"], 0);
    assert_eq!(report["verdicts"]["yukinnerproduct"]["pass"], true);
}

#[test]
fn corrupt_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"T\": [").unwrap();
    assert_eq!(code(&cy3(&["crystal", "verify", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&cy3(&["quintic", "--preset", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&cy3(&["family", "run", bad.to_str().unwrap()])), 2);
    let missing = dir.path().join("absent.json");
    assert_eq!(code(&cy3(&["crystal", "verify", missing.to_str().unwrap()])), 2);
}

#[test]
fn invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let out = out.to_str().unwrap();
    assert_eq!(code(&cy3(&["crystal", "synth", "--p", "3", "--out", out])), 2);
    assert_eq!(code(&cy3(&["crystal", "synth", "--p", "9", "--out", out])), 2);
    assert_eq!(code(&cy3(&["crystal", "synth", "--mode", "odd", "--out", out])), 2);
    assert_eq!(code(&cy3(&["quintic", "--primes", "4"])), 2);
    assert_eq!(code(&cy3(&["quintic", "--degree", "0"])), 2);
    assert_eq!(code(&cy3(&["crystal", "synth", "--seed", "x", "--out", out])), 2);
}

#[test]
fn quintic_matches_reference() {
    let o = cy3(&["quintic", "--degree", "5", "--primes", "2,3,5,7"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["data"]["mirror_map"], json!(["770", "1014275", "1703916750", "3286569025625"]));
    assert_eq!(r["data"]["b"][0], "575");
    for p in ["2", "3", "5", "7"] {
        assert_eq!(r["data"]["integrality"][p]["pass"], true);
    }
}

#[test]
fn quintic_degree_one_is_b1_only() {
    let o = cy3(&["quintic", "--degree", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["data"]["b"], json!(["575"]));
}

#[test]
fn external_quintic_spec_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let spec = json!({
        "name": "quintic",
        "pf_operator": [[0, -120], [0, -1250], [0, -4375], [0, -6250], [1, -3125]],
        "kappa": {"num": [5], "den": [0, 0, 0, 1, -3125]},
        "normalization": 5,
        "primes": [2, 3, 5, 7],
        "degree": 6,
    });
    let path = write(dir.path(), "quintic.json", &spec);
    let a = stdout_json(&cy3(&["family", "run", path.to_str().unwrap()]));
    let b = stdout_json(&cy3(&["quintic", "--degree", "6", "--primes", "2,3,5,7"]));
    assert_eq!(a["data"], b["data"]);
    assert_eq!(a["verdicts"], b["verdicts"]);
}

#[test]
fn theta4_family_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let spec = family("theta4", json!([[0], [0], [0], [0], [1]]), json!([0, 0, 0, 1]), 8);
    let path = write(dir.path(), "theta4.json", &spec);
    let o = cy3(&["family", "run", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert!(r["data"]["mirror_map"].as_array().unwrap().iter().all(|c| c == "0"));
    assert!(r["data"]["b"].as_array().unwrap().iter().all(|c| c == "0"));
    assert_eq!(r["data"]["integrality"]["5"]["pass"], true);
}

#[test]
fn nonzero_local_exponents_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let spec = family("shifted", json!([[0], [0], [0], [-1], [1]]), json!([0, 0, 0, 1]), 4);
    let path = write(dir.path(), "shifted.json", &spec);
    let o = cy3(&["family", "run", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta^4"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), &["--seed", "11", "--h", "2", "--p", "7"]);
    let first = std::fs::read(&a).unwrap();
    let b = synth(dir.path(), &["--seed", "11", "--h", "2", "--p", "7"]);
    assert_eq!(first, std::fs::read(&b).unwrap());
    let strip = |o: &Output| {
        let mut v = stdout_json(o);
        v.as_object_mut().unwrap().remove("timings");
        v
    };
    let path = a.to_str().unwrap();
    assert_eq!(strip(&cy3(&["crystal", "verify", path])), strip(&cy3(&["crystal", "verify", path])));
}

#[test]
fn battery_subcommand_reports_every_case() {
    let o = cy3(&["crystal", "battery", "--seeds", "2", "--h", "0,1", "--p", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["data"]["cases"], 4);
    assert_eq!(r["verdicts"]["pairing/h1_p5_seed1"]["pass"], true);
}

#[test]
fn report_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = cy3(&["quintic", "--degree", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config"]["degree"], 3);
}
