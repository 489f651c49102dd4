use serde_json::Value;
use std::process::{Command, Output};

fn rigid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigid")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn toric_so_odd_all_pass() {
    let out = rigid(&["toric", "--family", "so-odd", "--n", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["clauses"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn hyp_convert_reports_oper_and_constants() {
    let out = rigid(&["hyp-convert", "--n", "4", "--m", "2", "--u", "1,0,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // c_k = tr(p_1^k p_-1^k) for the principal sl4 triple.
    assert_eq!(v["c_consts"], serde_json::json!(["10", "24", "36"]));
    let slots = v["oper"]["slots"].as_array().unwrap();
    assert_eq!(slots.len(), 3);
    assert_eq!(slots[0]["lambda"]["coeffs"]["0"], "1/10");
}

#[test]
fn hyp_convert_round_trips_through_oper_coordinates() {
    let out = rigid(&["hyp-convert", "--n", "4", "--m", "2", "--u", "1,0,2"]);
    let v = json(&out);
    let spec: Vec<String> = v["oper"]["slots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let c = s["lambda"]["coeffs"].as_object().unwrap();
            if c.is_empty() {
                "0".to_string()
            } else {
                c.iter().map(|(e, x)| format!("{}:{}", e, x.as_str().unwrap())).collect::<Vec<_>>().join(",")
            }
        })
        .collect();
    let back = rigid(&["hyp-convert", "--n", "4", "--m", "2", "--oper", &spec.join(";")]);
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(json(&back)["hyp"], v["hyp"]);
}

#[test]
fn malformed_family_is_usage_error() {
    let out = rigid(&["toric", "--family", "e8", "--n", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "usage");
}

#[test]
fn domain_error_is_usage_error() {
    let out = rigid(&["toric", "--family", "sl", "--n", "3", "--m", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gl_opers_are_unsupported() {
    let out = rigid(&["oper-slope", "--family", "gl", "--n", "2", "--d", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["kind"], "unsupported");
}

#[test]
fn output_is_deterministic() {
    let args = ["hitchin-sample", "--family", "sp", "--n", "3", "--m", "2", "--seed", "7", "--count", "2"];
    let a = rigid(&args);
    let b = rigid(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn batch_mode_and_out_file() {
    let dir = std::env::temp_dir().join(format!("rigid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = dir.join("cases.json");
    let out = dir.join("out.json");
    std::fs::write(
        &cases,
        r#"[{"command": "toric", "family": "so-odd", "n": 3, "m": 2},
            {"command": "oper-slope", "family": "sl", "n": 2, "d": 3, "seed": 1},
            {"command": "pushout", "embedding": "sp-sl", "n": 2, "d": 4}]"#,
    )
    .unwrap();
    let r = rigid(&["--cases", cases.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cs = v["cases"].as_array().unwrap();
    assert_eq!(cs.len(), 3);
    assert_eq!(cs[1]["certificate"]["slope"]["slope"], "1/3");
    assert_eq!(cs[2]["certificate"]["matches"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_all_single_criterion() {
    let out = rigid(&["verify-all", "--criteria", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["all_pass"], true);
}
