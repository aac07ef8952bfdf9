//! The `triconst` binary: exit-code contract and machine-readable outputs.

use std::process::Command;

fn triconst(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_triconst")).args(args).output().expect("run binary");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn constants_reproduce_table_row() {
    let (code, out) = triconst(&["constants", "--shape", "0", "1"]);
    assert_eq!(code, 0);
    for want in ["K1 = 0.3340766", "K2 = 0.2417624", "K3 = 0.1702673", "K4 = 0.4915960"] {
        assert!(out.contains(want), "{want} missing in\n{out}");
    }
    let (code, same) = triconst(&["constants", "--vertices", "0,0", "1,0", "0,1"]);
    assert_eq!(code, 0);
    assert_eq!(out, same);
}

#[test]
fn exit_codes() {
    assert_eq!(triconst(&["constants", "--shape", "0", "0"]).0, 2);
    assert_eq!(triconst(&["verify", "--mode", "thm61", "--k", "0"]).0, 2);
    assert_eq!(triconst(&["identities", "--lemma", "99"]).0, 2);
    assert_eq!(triconst(&["verify", "--mode", "thm61", "--k", "1", "--l", "", "--n", "20"]).0, 0);
}

#[test]
fn identities_single_lemma() {
    let (code, out) = triconst(&["identities", "--lemma", "14.9", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["cases"][0]["method"], "hessian_reduce_expand");
}

#[test]
fn json_rationals_round_trip() {
    let (code, out) = triconst(&["verify", "--mode", "thm62", "--l", "7", "--j", "2", "--n", "3", "--format", "json"]);
    assert!(code == 0 || code == 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let p = &v["points"][0];
    for key in ["a", "b", "lambda"] {
        let s = p[key].as_str().unwrap();
        let q = triconst::symbolic::rational::parse_rational(s).unwrap();
        assert_eq!(triconst::symbolic::rational::format_rational(&q), s);
    }
    assert_eq!(p["a"], "7/500");
    assert_eq!(p["b"], "1/10");
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_triconst"))
        .args(["verify", "--mode", "thm62", "--l", "0", "--j", "1", "--n", "3", "--format", "json"])
        .env("TRICONST_THREADS", "1")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["threads"], 1);
}
