use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use weierkern::cli::run;
use weierkern::curve::Chart;
use weierkern::{fixtures, C64};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(name);
    p.to_str().unwrap().to_owned()
}

fn ok(args: &[&str]) -> Value {
    let mut full = vec!["weierkern"];
    full.extend_from_slice(args);
    let (code, out) = run(full);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weierkern-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn numbers_are_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(numbers_are_finite),
        Value::Object(m) => m.values().all(numbers_are_finite),
        _ => true,
    }
}

#[test]
fn kernel_eval_gives_two_twentyfirsts() {
    let v = ok(&["kernel", "eval", &fixture("fixture.json"), "--variant", "g4", "--x", "2,-2,-1", "--y", "-1,-1,1"]);
    assert!((v["coeff"]["re"].as_f64().unwrap() - 2.0 / 21.0).abs() < 1e-12);
    assert_eq!(v["coeff"]["im"].as_f64().unwrap(), 0.0);
    assert_eq!(v["weight"], 1);
}

#[test]
fn fiber_above_minus_one_holds_the_hand_point() {
    let v = ok(&["curve", "fiber", &fixture("fixture.json"), "--x1", "-1,0"]);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 6);
    let hit = pts.iter().any(|p| {
        let x = p["x"].as_array().unwrap();
        let want = [-1.0, -1.0, 1.0];
        (0..3).all(|i| (x[i]["re"].as_f64().unwrap() - want[i]).abs() < 1e-10 && x[i]["im"].as_f64().unwrap().abs() < 1e-10)
    });
    assert!(hit);
}

#[test]
fn curve_check_reports_genus_four() {
    let v = ok(&["curve", "check", &fixture("fixture.json"), "--samples", "20"]);
    assert_eq!(v["genus"], 4);
    assert_eq!(v["degrees"], serde_json::json!([3, 2]));
    let s = ok(&["curve", "check", &fixture("fixture_smooth.json"), "--samples", "20"]);
    assert_eq!(s["smoothness"]["passed"], true);
    assert_eq!(s["riemann_hurwitz"]["total"], s["riemann_hurwitz"]["expected"]);
}

#[test]
fn residue_and_laurent_on_the_diagonal() {
    let f = fixture("fixture.json");
    let base = ["kernel", "residue", &f, "--variant", "compact", "--center", "-1,0", "--anchor", "-1,-1,1"];
    let v = ok(&base);
    assert!((v["value"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let mut laurent = base.to_vec();
    laurent[1] = "laurent";
    laurent.extend(["--k", "-2"]);
    let v = ok(&laurent);
    assert!(v["value"]["re"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn basis_listing_sizes() {
    let f = fixture("fixture_smooth.json");
    assert_eq!(ok(&["basis", &f])["numerators"].as_array().unwrap().len(), 4);
    assert_eq!(ok(&["basis", &f, "--weight", "2"])["numerators"].as_array().unwrap().len(), 9);
}

#[test]
fn correlator_from_point_files() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let pts: Vec<Value> = (0..10)
        .map(|i| {
            let base = C64::new(-1.2 + 0.25 * i as f64, 0.3 - 0.1 * i as f64);
            let p = k.fiber(base, Chart::Affine).unwrap().points[i % 6];
            Value::Array(p.x.iter().map(|z| serde_json::json!({ "re": z.re, "im": z.im })).collect())
        })
        .collect();
    let b = scratch("b.json");
    let c = scratch("c.json");
    std::fs::write(&b, serde_json::to_string(&pts[..9]).unwrap()).unwrap();
    std::fs::write(&c, "[]").unwrap();
    let args = ["correlator", &fixture("fixture_smooth.json"), "--lambda", "2", "--b", b.to_str().unwrap(), "--c", c.to_str().unwrap()];
    let v = ok(&args);
    assert!(v["invariance"]["rel_delta"].as_f64().unwrap() <= 1e-10);
    assert!(numbers_are_finite(&v));
    let (_, first) = run(std::iter::once("weierkern").chain(args));
    let (_, again) = run(std::iter::once("weierkern").chain(args));
    assert_eq!(first, again);
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let f = fixture("fixture_smooth.json");
    let (code, a) = run(["weierkern", "selftest", &f, "--seed", "5"]);
    let (_, b) = run(["weierkern", "selftest", &f, "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["passed"], true, "{a}");
}

#[test]
fn output_flag_writes_the_file() {
    let out = scratch("genus.json");
    let (code, text) = run(["weierkern", "curve", "fiber", &fixture("fixture.json"), "--x1", "0.5,0.5", "--output", out.to_str().unwrap()]);
    assert_eq!((code, text.as_str()), (0, ""));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 6);
}

fn error_of(args: &[&str]) -> (i32, Value) {
    let (code, out) = run(std::iter::once("weierkern").chain(args.iter().copied()));
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn errors_are_json_with_exit_codes() {
    let f = fixture("fixture.json");
    let (code, v) = error_of(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, v) = error_of(&["kernel", "eval", &f, "--x", "-1,-1,1", "--y", "-1,-1,1"]);
    assert_eq!(code, 3);
    assert!(v["error"]["detail"].is_string());
    let (code, _) = error_of(&["kernel", "eval", &f, "--x", "1,1,1", "--y", "-1,-1,1"]);
    assert_eq!(code, 3);
    let (code, _) = error_of(&["basis", &f, "--weight", "3"]);
    assert_eq!(code, 2);
    let (code, _) = error_of(&["curve", "check", "/nonexistent/curve.json"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_exit_codes_and_streams() {
    let bin = env!("CARGO_BIN_EXE_weierkern");
    let out = Command::new(bin)
        .args(["kernel", "eval", &fixture("fixture.json"), "--x", "2,-2,-1", "--y", "-1,-1,1"])
        .env("WEIERKERN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variant"], "g4");
    let bad = Command::new(bin).args(["curve", "fiber"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    let v: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn shipped_fixtures_match_the_library() {
    use weierkern::cli::io::{load_curve, LoadedCurve};
    let load = |name: &str| match load_curve(std::path::Path::new(&fixture(name))).unwrap() {
        LoadedCurve::Space(c) => c,
        LoadedCurve::Plane(_) => panic!("{name} is a plane curve"),
    };
    let lit = load("fixture.json");
    assert_eq!(lit.f(), fixtures::literal().f());
    let smooth = load("fixture_smooth.json");
    let want = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    assert_eq!((smooth.f(), smooth.g()), (want.f(), want.g()));
}
