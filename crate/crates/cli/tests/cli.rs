use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use engelsteer_core::horizontal::{lift, uniform_grid};
use engelsteer_core::whitney::{CompactSet1D, CurveFragment};
use engelsteer_core::{Controls, Poly};
use serde_json::{json, Value};
use tempfile::TempDir;

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let s: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(schema_name: &str, v: &Value) {
    let errors: Vec<String> = schema(schema_name).iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}\n{v:#}");
}

struct Run {
    out: Output,
    dir: PathBuf,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().unwrap()
    }

    fn report(&self, stem: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.dir.join(format!("{stem}.json"))).unwrap()).unwrap()
    }

    fn error(&self) -> Value {
        let v: Value = serde_json::from_slice(&self.out.stderr).unwrap();
        assert_valid("error.schema.json", &v);
        v
    }
}

fn write_input(dir: &Path, name: &str, body: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body.to_string()).unwrap();
    p
}

fn run(dir: &Path, sub: &str, input: &str, output: &str, extra: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_engelsteer"))
        .current_dir(dir)
        .env_remove("ENGELSTEER_SEED")
        .args([sub, "--input", input, "--output", output])
        .args(extra)
        .output()
        .unwrap();
    Run {
        out,
        dir: dir.to_path_buf(),
    }
}

fn curve_input() -> Value {
    json!({"controls":{"u1":{"poly":[1.0,0.2]},"u2":{"poly":[0.0,1.0,-1.0]}},"domain":[0.0,1.0],"start":[0,0,0,0]})
}

fn fragment_input(u1: Vec<f64>) -> Value {
    let c = Controls::polynomial(Poly::new(u1), Poly::new(vec![0.5, -1.0, 0.8]), 0.0, 1.0);
    let g = lift(&c, &[0.0; 4], &uniform_grid(0.0, 1.0, 401)).unwrap();
    let k = CompactSet1D::new(vec![(0.0, 0.3), (0.5, 0.6), (0.8, 1.0)]).unwrap();
    serde_json::to_value(CurveFragment::restrict(&g, &k).unwrap()).unwrap()
}

#[test]
fn steer_hits_the_target() {
    let dir = TempDir::new().unwrap();
    let problem = json!({"a":1,"b":0,"target":[1,0,0,0.001]});
    assert_valid("input/steer.schema.json", &problem);
    write_input(dir.path(), "problem.json", &problem);
    let r = run(dir.path(), "steer", "problem.json", "curve.csv", &[]);
    assert_eq!(r.code(), 0, "{}", String::from_utf8_lossy(&r.out.stderr));
    let d = r.report("curve");
    assert_valid("steer.schema.json", &d);
    assert!(d["residual"].as_f64().unwrap() < 1e-10);
    let csv = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert!(csv.starts_with("t,x1,x2,x3,x4,u1,u2\n"));
    assert_eq!(csv.lines().count(), 1002);
}

#[test]
fn steer_with_end_derivative() {
    let dir = TempDir::new().unwrap();
    write_input(
        dir.path(),
        "p.json",
        &json!({"a":1,"b":0.5,"target":[0.8,0.3,0.2,0.05],"end_deriv":[0.9,-0.2]}),
    );
    let r = run(dir.path(), "steer", "p.json", "c.csv", &["--grid", "201"]);
    assert_eq!(r.code(), 0);
    let d = r.report("c");
    assert_valid("steer.schema.json", &d);
    assert_eq!(d["family"]["kind"], "full");
}

#[test]
fn vertical_direction_exits_with_domain_error() {
    let dir = TempDir::new().unwrap();
    write_input(dir.path(), "p.json", &json!({"a":0,"b":1,"target":[0,1,0,0]}));
    let r = run(dir.path(), "steer", "p.json", "c.csv", &[]);
    assert_eq!(r.code(), 2);
    assert_eq!(r.error()["error"]["code"], "SINGULAR_DIRECTION");
    assert!(!dir.path().join("c.csv").exists());
}

#[test]
fn probe_finds_no_violations() {
    let dir = TempDir::new().unwrap();
    let spec = json!({"b":1,"trials":1000});
    assert_valid("input/probe.schema.json", &spec);
    write_input(dir.path(), "probe.json", &spec);
    let r = run(dir.path(), "probe", "probe.json", "report.out", &[]);
    assert_eq!(r.code(), 0);
    let d = r.report("report");
    assert_valid("probe.schema.json", &d);
    assert_eq!(d["violations"], 0);
    assert_eq!(d["seed"], 42);
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let dir = TempDir::new().unwrap();
    write_input(dir.path(), "probe.json", &json!({"b":-1,"trials":10}));
    let r = run(dir.path(), "probe", "probe.json", "a.out", &["--seed", "7"]);
    assert_eq!(r.report("a")["seed"], 7);
    let out = Command::new(env!("CARGO_BIN_EXE_engelsteer"))
        .current_dir(dir.path())
        .env("ENGELSTEER_SEED", "9")
        .args(["probe", "--input", "probe.json", "--output", "b.out"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let b: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(b["seed"], 9);
}

#[test]
fn io_and_parse_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), "lift", "missing.json", "c.csv", &[]);
    assert_eq!(r.code(), 1);
    assert_eq!(r.error()["error"]["code"], "IO_ERROR");

    fs::write(dir.path().join("bad.json"), "{\"a\":1,").unwrap();
    let r = run(dir.path(), "steer", "bad.json", "c.csv", &[]);
    assert_eq!(r.code(), 1);
    assert_eq!(r.error()["error"]["code"], "PARSE_ERROR");

    write_input(
        dir.path(),
        "extra.json",
        &json!({"a":1,"b":0,"target":[1,0,0,0],"bogus":1}),
    );
    assert_eq!(run(dir.path(), "steer", "extra.json", "c.csv", &[]).code(), 1);

    fs::write(dir.path().join("bad.csv"), "t,x1\n0,1\n").unwrap();
    let r = run(dir.path(), "check", "bad.csv", "r.out", &[]);
    assert_eq!(r.code(), 1);
    assert_eq!(r.error()["error"]["code"], "PARSE_ERROR");
}

#[test]
fn refuses_to_overwrite_the_input() {
    let dir = TempDir::new().unwrap();
    let p = write_input(dir.path(), "s.json", &json!({"a":1,"b":0,"target":[1,0,0,0.001]}));
    let before = fs::read(&p).unwrap();
    let r = run(dir.path(), "steer", "s.json", "s.csv", &[]);
    assert_eq!(r.code(), 1);
    assert_eq!(fs::read(&p).unwrap(), before);
}

#[test]
fn lift_then_check_round_trip() {
    let dir = TempDir::new().unwrap();
    assert_valid("input/curve.schema.json", &curve_input());
    write_input(dir.path(), "curve.json", &curve_input());
    let r = run(dir.path(), "lift", "curve.json", "lifted.csv", &[]);
    assert_eq!(r.code(), 0);
    assert_valid("lift.schema.json", &r.report("lifted"));
    let r = run(dir.path(), "check", "lifted.csv", "check.out", &[]);
    assert_eq!(r.code(), 0);
    let d = r.report("check");
    assert_valid("check.schema.json", &d);
    assert!(d["horizontality_residual"].as_f64().unwrap() < 1e-5);
}

#[test]
fn sampled_controls_lift() {
    let dir = TempDir::new().unwrap();
    let input = json!({"samples":{"times":[0.0,0.5,1.0],"u1":[1.0,1.0,0.5],"u2":[0.0,1.0,0.0]}});
    assert_valid("input/curve.schema.json", &input);
    write_input(dir.path(), "s.json", &input);
    let r = run(dir.path(), "lift", "s.json", "lifted.csv", &["--grid", "11"]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.report("lifted")["samples"], 11);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    write_input(dir.path(), "curve.json", &curve_input());
    write_input(dir.path(), "p.json", &json!({"a":1,"b":0,"target":[1,0,0,0.001]}));
    for (sub, input) in [("lift", "curve.json"), ("steer", "p.json"), ("lusin", "curve.json")] {
        assert_eq!(run(dir.path(), sub, input, "one.csv", &[]).code(), 0);
        assert_eq!(run(dir.path(), sub, input, "two.csv", &[]).code(), 0);
        let read = |f: &str| fs::read(dir.path().join(f)).unwrap();
        assert_eq!(read("one.csv"), read("two.csv"), "{sub} csv");
        assert_eq!(read("one.json"), read("two.json"), "{sub} diagnostics");
    }
}

#[test]
fn extend_and_check_a_fragment() {
    let dir = TempDir::new().unwrap();
    let frag = fragment_input(vec![1.0, -0.3]);
    assert_valid("input/fragment.schema.json", &frag);
    write_input(dir.path(), "frag.json", &frag);
    let r = run(dir.path(), "extend", "frag.json", "gamma.csv", &[]);
    assert_eq!(r.code(), 0, "{}", String::from_utf8_lossy(&r.out.stderr));
    let d = r.report("gamma");
    assert_valid("extend.schema.json", &d);
    assert_eq!(d["per_gap"].as_array().unwrap().len(), 2);
    assert!(d["max_derivative_jump"].as_f64().unwrap() < 1e-3);

    let r = run(dir.path(), "check", "gamma.csv", "gcheck.out", &[]);
    assert!(r.report("gcheck")["horizontality_residual"].as_f64().unwrap() < 1e-5);
    let r = run(dir.path(), "check", "frag.json", "fcheck.out", &[]);
    assert_eq!(r.code(), 0);
    let d = r.report("fcheck");
    assert_valid("check.schema.json", &d);
    assert_eq!(d["kind"], "fragment");
}

#[test]
fn vertical_fragment_is_not_admissible() {
    let dir = TempDir::new().unwrap();
    // u1 vanishes at t = 0.5, an endpoint of K
    write_input(dir.path(), "frag.json", &fragment_input(vec![1.0, -2.0]));
    let r = run(dir.path(), "extend", "frag.json", "gamma.csv", &[]);
    assert_eq!(r.code(), 2);
    assert_eq!(r.error()["error"]["code"], "NOT_ADMISSIBLE");
}

#[test]
fn lusin_from_json_and_csv() {
    let dir = TempDir::new().unwrap();
    let input = json!({"samples":{"times":[0.0,0.5,0.5000001,1.0],"u1":[1.0,1.0,0.0,0.0],"u2":[0.0,0.5,0.5,1.0]}});
    write_input(dir.path(), "half.json", &input);
    let r = run(dir.path(), "lusin", "half.json", "l.csv", &["--epsilon", "0.05"]);
    assert_eq!(r.code(), 0, "{}", String::from_utf8_lossy(&r.out.stderr));
    let d = r.report("l");
    assert_valid("lusin.schema.json", &d);
    assert!(d["agreement"].as_f64().unwrap() > d["measure_s"].as_f64().unwrap() - 0.05);

    write_input(
        dir.path(),
        "vertical.json",
        &json!({"controls":{"u1":{"poly":[0.0]},"u2":{"poly":[1.0]}},"domain":[0.0,1.0]}),
    );
    assert_eq!(run(dir.path(), "lift", "vertical.json", "v.csv", &[]).code(), 0);
    let r = run(dir.path(), "lusin", "v.csv", "vl.csv", &[]);
    assert_eq!(r.code(), 0);
    let d = r.report("vl");
    assert_valid("lusin.schema.json", &d);
    assert_eq!(d["route"], "degenerate");
}
