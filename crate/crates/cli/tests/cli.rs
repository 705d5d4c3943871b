use std::process::{Command, Output};

use hdcoding::curves::{discontinuity_params, CurvesConfig};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdcoding")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn text_ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn xy(v: &Value) -> (String, String) {
    (v["x"].as_str().unwrap().to_string(), v["y"].as_str().unwrap().to_string())
}

// Point whose words start 3,-2,1 and 1,-4,1, located by `decode`.
const EXAMPLE_POINT: &str = "-11223035/16777216,26050565/16777216";

#[test]
fn orbit_forward_exact() {
    let v = json_ok(&["orbit", "--point", "1,1", "--fwd", "3"]);
    let pts: Vec<_> = v["forward"].as_array().unwrap().iter().map(xy).collect();
    let want = [("1/1", "1/1"), ("2/1", "-1/1"), ("1/1", "-2/1"), ("1/2", "-5/2")];
    assert_eq!(pts.len(), want.len());
    for (g, w) in pts.iter().zip(want) {
        assert_eq!((g.0.as_str(), g.1.as_str()), w);
    }
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "orbit");
}

#[test]
fn orbit_terminations() {
    let v = json_ok(&["orbit", "--point", "0,1", "--fwd", "3"]);
    assert_eq!(v["forward_termination"]["HitYZero"], 1);
    let v = json_ok(&["orbit", "--point", "1,-1", "--bwd", "1"]);
    assert_eq!(v["backward_termination"]["HitAntiDiagonal"], 0);
}

#[test]
fn orbit_csv_and_decimal_input() {
    let s = text_ok(&["--format", "csv", "orbit", "--point", "0.25,-1.5", "--fwd", "1", "--bwd", "1"]);
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines, ["t,x,y", "-1,21/20,-5/4", "0,1/4,-3/2", "1,-5/12,-13/12"]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["orbit", "--point", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["orbit", "--point", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--max-bits", "16", "orbit", "--point", "1/3,2/7", "--fwd", "30"]).status.code(), Some(3));
    assert_eq!(run(&["curves", "--family", "R", "--level", "12"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn code_reproduces_worked_example() {
    let v = json_ok(&["code", "--point", EXAMPLE_POINT, "--depth", "12"]);
    let hi = v["h_i"]["text"].as_str().unwrap();
    let hj = v["h_j"]["text"].as_str().unwrap();
    assert!(hi.contains("-2 -2 -2 -1 2 ; 2 2 1 -2"), "{hi}");
    assert!(hj.contains("-1 -2 -2 -2 ; 1 2 2 2 -1 -2"), "{hj}");
    assert_eq!(&v["i_word"]["entries"].as_array().unwrap()[..3], &[3, -2, 1]);
    assert_eq!(&v["j_word"]["entries"].as_array().unwrap()[..3], &[1, -4, 1]);
}

#[test]
fn code_csv_rows_and_mirror() {
    let s = text_ok(&["--format", "csv", "code", "--point", EXAMPLE_POINT, "--depth", "6"]);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("t,s_i,s_j"));
    let rows: Vec<Vec<i64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), (-4..4).collect::<Vec<_>>());
    let at = |t: i64| rows.iter().find(|r| r[0] == t).unwrap().clone();
    assert_eq!((at(0)[1], at(0)[2]), (2, 1));

    let plain = json_ok(&["code", "--point", EXAMPLE_POINT, "--depth", "8"]);
    let mirrored = json_ok(&["code", "--point", EXAMPLE_POINT, "--depth", "8", "--mirror"]);
    for key in ["h_i", "h_j"] {
        let a = plain[key]["symbols"].as_array().unwrap();
        let b = mirrored[key]["symbols"].as_array().unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.as_i64().unwrap(), -y.as_i64().unwrap());
        }
    }
}

#[test]
fn code_float_mode_agrees_on_generic_point() {
    let exact = json_ok(&["code", "--point", "3/7,5/2", "--depth", "8"]);
    let float = json_ok(&["--mode", "float", "code", "--point", "3/7,5/2", "--depth", "8"]);
    assert_eq!(exact["h_i"]["symbols"], float["h_i"]["symbols"]);
    assert_eq!(exact["h_j"]["symbols"], float["h_j"]["symbols"]);
}

#[test]
fn curves_level_one_formulas() {
    let v = json_ok(&["curves", "--family", "R", "--level", "1", "--samples", "7"]);
    let mut n = 0;
    for b in v["branches"].as_array().unwrap() {
        for p in b["points"].as_array().unwrap() {
            let (t, x, y) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap(), p[2].as_f64().unwrap());
            assert!((x - (t - 1.0 / t)).abs() < 1e-9 && (y - t).abs() < 1e-12);
            n += 1;
        }
    }
    assert!(n >= 7);
    let v = json_ok(&["curves", "--family", "L", "--level", "1", "--samples", "7"]);
    for b in v["branches"].as_array().unwrap() {
        for p in b["points"].as_array().unwrap() {
            let (t, x, y) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap(), p[2].as_f64().unwrap());
            assert!((x - (t - 1.0 / t)).abs() < 1e-9 && (y - (-2.0 * t + 1.0 / t)).abs() < 1e-9);
        }
    }
}

#[test]
fn curves_branch_count_at_level_three() {
    let d = discontinuity_params(3, &CurvesConfig::default()).unwrap();
    let per_side =
        |v: &Value, side: &str| v["branches"].as_array().unwrap().iter().filter(|b| b["side"] == side).count();
    for fam in ["R", "L"] {
        let v = json_ok(&["curves", "--family", fam, "--level", "3", "--samples", "3"]);
        let total = v["branches"].as_array().unwrap().len();
        assert_eq!(total, 1 + d.params.len(), "{fam}");
        assert_eq!(per_side(&v, "negative") + per_side(&v, "positive"), total);
        assert!(per_side(&v, "negative") > 0 && per_side(&v, "positive") > 0);
    }
    let s = text_ok(&["--format", "csv", "curves", "--family", "L", "--level", "1", "--samples", "3"]);
    assert_eq!(s.lines().next(), Some("branch,family,level,side,t_lower,t_upper,t,x,y"));
}

#[test]
fn decode_verifies_in_line() {
    let v = json_ok(&["decode", "--iword", "1", "--jword", "1", "--box", "0,3,0,3"]);
    assert_eq!(v["recode_verified"], true);
    let v = json_ok(&["decode", "--iword", "3,-2,1", "--jword", "1,-4,1", "--box", "-10,10,-10,10"]);
    assert_eq!(v["recode_verified"], true);
    let v = json_ok(&["decode", "--iword", "1,-2", "--finite"]);
    assert_eq!(v["recode_verified"], true);
}

#[test]
fn decode_not_found_prints_diagnostics() {
    let out = run(&[
        "--max-refinements",
        "3",
        "decode",
        "--iword",
        "7,-1,5,-3",
        "--jword",
        "6,-1,8",
        "--box",
        "1/1000,2/1000,1/1000,2/1000",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "not_found");
    assert!(v["diagnostics"]["probes"].as_u64().unwrap() > 0);
    assert!(!v["diagnostics"]["reason"].as_str().unwrap().is_empty());
}

#[test]
fn periodic_period_two() {
    let v = json_ok(&["periodic", "--icycle", "1,-1"]);
    assert_eq!(v["status"], "found");
    assert_eq!(xy(&v["point"]), ("-1/1".to_string(), "1/2".to_string()));
    assert!((v["trace"].as_f64().unwrap() - 34.0).abs() < 1e-9);
    assert_eq!(run(&["periodic", "--icycle", "1,-1", "--jcycle", "1,-1"]).status.code(), Some(2));
}

#[test]
fn boole_commands() {
    let v = json_ok(&["boole", "apply", "--x", "7/3", "--steps", "2"]);
    assert_eq!(v["values"], serde_json::json!(["7/3", "40/21", "1159/840"]));
    let v = json_ok(&["boole", "code", "--x", "7/3", "--depth", "12"]);
    assert_eq!(v["entries"], 12);
    assert!(!v["h_b"]["symbols"].as_array().unwrap().is_empty());
    let v = json_ok(&["boole", "decode", "--word", "1,-1,2"]);
    let w = v["width"].as_f64().unwrap();
    assert!(w > 0.0 && w < 1.0);
    let out = run(&["boole", "check-measure", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reports_and_is_deterministic() {
    let a = run(&["verify", "--suite", "core", "--seed", "7"]);
    let b = run(&["verify", "--suite", "core", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["pass"], true);
    let s = text_ok(&["--format", "csv", "verify", "--suite", "core"]);
    assert_eq!(s.lines().next(), Some("check,pass,tested,failed,skipped"));
    assert_eq!(s.lines().count(), 1 + v["checks"].as_array().unwrap().len());
}
