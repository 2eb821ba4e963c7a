use std::fs;
use std::path::Path;

use engelsteer_core::horizontal::{curve_length, horizontality_residual, uniform_grid};
use engelsteer_core::io::{CurveSpec, ProbeSpec, SteerProblem};
use engelsteer_core::steering::{steer_full, steer_position, x2_obstruction_probe, SteerOptions};
use engelsteer_core::whitney::{self, check_whitney, default_etas, CurveFragment, ExtendOptions, LusinOptions};
use engelsteer_core::{lift as lift_curve, SampledCurve};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::output::{diagnostics_path, write_curve, write_diagnostics, CliError, CliResult};
use crate::RunConfig;

/// Rejects configurations whose outputs would overwrite the input.
fn guard(cfg: &RunConfig) -> CliResult<()> {
    let same = |p: &Path| match (fs::canonicalize(p), fs::canonicalize(&cfg.input)) {
        (Ok(a), Ok(b)) => a == b,
        _ => p == cfg.input,
    };
    if same(&cfg.output) || same(&diagnostics_path(&cfg.output)) {
        return Err(CliError::io(&cfg.input, "output would overwrite the input"));
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

fn read_csv(path: &Path) -> CliResult<SampledCurve> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    SampledCurve::read_csv(file).map_err(|e| CliError::parse(path, e))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn lift_spec(spec: &CurveSpec, n: usize) -> CliResult<SampledCurve> {
    let controls = spec.controls()?;
    let (t0, t1) = controls.domain();
    Ok(lift_curve(&controls, &spec.start(), &uniform_grid(t0, t1, n))?)
}

fn extend_options(cfg: &RunConfig) -> ExtendOptions {
    let mut opts = ExtendOptions {
        tau_dir: cfg.tau_dir,
        ..Default::default()
    };
    opts.steer.tol = cfg.tol;
    opts
}

pub fn lift(cfg: &RunConfig) -> CliResult<()> {
    guard(cfg)?;
    let spec: CurveSpec = read_json(&cfg.input)?;
    let curve = lift_spec(&spec, cfg.grid)?;
    let report = json!({
        "subcommand": "lift",
        "samples": curve.len(),
        "domain": curve.domain(),
        "start": curve.start(),
        "end": curve.end(),
        "length": curve_length(&spec.controls()?),
        "horizontality_residual": horizontality_residual(&curve)?,
    });
    write_curve(&cfg.output, &curve)?;
    write_diagnostics(&cfg.output, &report)
}

pub fn steer(cfg: &RunConfig) -> CliResult<()> {
    guard(cfg)?;
    let p: SteerProblem = read_json(&cfg.input)?;
    let opts = SteerOptions {
        tol: p.tol.unwrap_or(cfg.tol),
        grid: cfg.grid,
        ..Default::default()
    };
    let sol = match &p.end_deriv {
        Some(d) => steer_full(p.a, p.b, d, &p.target, &opts)?,
        None => steer_position(p.a, p.b, &p.target, &opts)?,
    };
    let report = json!({
        "subcommand": "steer",
        "family": sol.family,
        "params_lo": sol.params_lo,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "target": p.target,
        "endpoint": sol.curve.end(),
    });
    write_curve(&cfg.output, &sol.curve)?;
    write_diagnostics(&cfg.output, &report)
}

pub fn extend(cfg: &RunConfig) -> CliResult<()> {
    guard(cfg)?;
    let frag: CurveFragment = read_json(&cfg.input)?;
    let r = whitney::extend(&frag, &extend_options(cfg))?;
    let d = &r.diagnostics;
    let report = json!({
        "subcommand": "extend",
        "samples": r.gamma.len(),
        "r_table": d.r_table,
        "threshold": d.threshold,
        "max_residual": d.max_residual,
        "max_derivative_jump": d.max_derivative_jump,
        "per_gap": d.per_gap,
    });
    write_curve(&cfg.output, &r.gamma)?;
    write_diagnostics(&cfg.output, &report)
}

pub fn lusin(cfg: &RunConfig) -> CliResult<()> {
    guard(cfg)?;
    let curve = if is_csv(&cfg.input) {
        read_csv(&cfg.input)?
    } else {
        lift_spec(&read_json(&cfg.input)?, cfg.grid)?
    };
    let opts = LusinOptions {
        epsilon: cfg.epsilon,
        tau_dir: cfg.tau_dir,
        tol: cfg.tol,
        extend: extend_options(cfg),
    };
    let r = whitney::lusin(&curve, &opts)?;
    let mut report = serde_json::to_value(&r).map_err(|e| CliError::Io(e.to_string()))?;
    if let Value::Object(m) = &mut report {
        m.remove("gamma");
        m.insert("subcommand".into(), "lusin".into());
    }
    write_curve(&cfg.output, &r.gamma)?;
    write_diagnostics(&cfg.output, &report)
}

pub fn check(cfg: &RunConfig) -> CliResult<()> {
    guard(cfg)?;
    let report = if is_csv(&cfg.input) {
        let curve = read_csv(&cfg.input)?;
        json!({
            "subcommand": "check",
            "kind": "curve",
            "samples": curve.len(),
            "domain": curve.domain(),
            "horizontality_residual": horizontality_residual(&curve)?,
        })
    } else {
        let frag: CurveFragment = read_json(&cfg.input)?;
        json!({
            "subcommand": "check",
            "kind": "fragment",
            "samples": frag.len(),
            "measure": frag.k().measure(),
            "min_direction_norm": frag.min_direction_norm(),
            "r_table": check_whitney(&frag, &default_etas(&frag))?,
        })
    };
    write_diagnostics(&cfg.output, &report)
}

pub fn probe(cfg: &RunConfig) -> CliResult<()> {
    guard(cfg)?;
    let spec: ProbeSpec = read_json(&cfg.input)?;
    let mut report = serde_json::to_value(x2_obstruction_probe(
        spec.b,
        spec.trials,
        spec.seed.unwrap_or(cfg.seed),
    )?)
    .map_err(|e| CliError::Io(e.to_string()))?;
    if let Value::Object(m) = &mut report {
        m.insert("subcommand".into(), "probe".into());
    }
    write_diagnostics(&cfg.output, &report)
}
