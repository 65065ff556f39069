//! One function per command; each returns a pass flag and a JSON result.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::artifacts::{orbit_csv, ppm_bytes, sha256_hex, write_atomic};
use super::{parse_args, parse_config, Command, RenderMap, RunConfig, EXIT_FAIL, EXIT_IO, EXIT_PASS, EXIT_USAGE};
use crate::base_map::{build_schedule, g_eval, reference_orbit, verify_growth, ScheduleMode};
use crate::beltrami::container::map_to_bytes;
use crate::dynamics::{
    center_chain, containment_suite, escape_time_field, iterate_orbit, shoot, verify_inclusions, ToyInstance,
};
use crate::error::{QrwdError, Result};
use crate::estimates::{
    case_bound, check_assumption, disc_key_integral, disc_pole_integral, inclusion_sweep, key_case, key_inequality_rhs,
    paper_family_separation, random_case_config, random_pole_case, DiscFamily, KeyCase, KeyConstants,
};
use crate::interpolation::{build_g, build_rho, disc_radius, estimate_dilatation, matching_defect, QrPiece};
use crate::numerics::{c, Disc, C64};
use crate::qr_map::ParameterSequence;

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    /// The full report as written to disk.
    pub report: Value,
    pub exit_code: i32,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Height and margin used by the case-bound suite.
const CASE_HEIGHT: f64 = 6.0;
const CASE_ETA: f64 = 0.25;
/// Degrees checked by the matching identity.
const MATCHING_DEGREES: u32 = 50;

fn cmd_schedule(cfg: &RunConfig) -> Result<(bool, Value)> {
    let s = match cfg.schedule_mode {
        ScheduleMode::TrueScale => build_schedule(cfg.nmax, ScheduleMode::TrueScale, None)?,
        ScheduleMode::Toy => build_schedule(cfg.toy_params.d.len() as u32, ScheduleMode::Toy, Some(&cfg.toy_params))?,
    };
    Ok((true, json!({ "schedule": to_json(&s) })))
}

fn matching_rows() -> (bool, Value) {
    let mut pass = true;
    let rows: Vec<Value> = (1..=MATCHING_DEGREES)
        .map(|d| {
            let (cosh_side, power_side) = matching_defect(d);
            let ok = cosh_side < 1e-10 && power_side < 1e-12;
            pass &= ok;
            json!({ "d": d, "cosh_defect": cosh_side, "power_defect": power_side, "pass": ok })
        })
        .collect();
    (pass, Value::Array(rows))
}

fn cmd_verify(cfg: &RunConfig) -> Result<(bool, Value)> {
    let (matching_pass, matching) = matching_rows();
    if cfg.schedule_mode == ScheduleMode::Toy {
        let s = build_schedule(cfg.toy_params.d.len() as u32, ScheduleMode::Toy, Some(&cfg.toy_params))?;
        let growth = verify_growth(&s, cfg.nmin, cfg.nmax)?;
        return Ok((
            matching_pass,
            json!({ "matching": matching, "growth": to_json(&growth), "levels": s.entries.len() }),
        ));
    }
    let s = build_schedule(cfg.nmax + 1, ScheduleMode::TrueScale, None)?;
    let growth = verify_growth(&s, cfg.nmin, cfg.nmax)?;
    let orbit = reference_orbit(cfg.nmax as usize + 1)?;
    let sweeps = cfg.c5.iter().map(|&c5| inclusion_sweep(c5, &s, &orbit, cfg.nmax)).collect::<Result<Vec<_>>>()?;
    let first_n1 = sweeps[0].measured_n1;
    let n1_stable = sweeps.iter().all(|sw| sw.measured_n1.is_some() && sw.measured_n1 == first_n1);
    let separation = paper_family_separation(&s, cfg.nmax)?;
    let separation_pass = separation.iter().all(|r| r.ok);
    let pass = matching_pass && growth.all_pass && n1_stable && separation_pass;
    Ok((
        pass,
        json!({
            "range": [cfg.nmin, cfg.nmax],
            "matching": matching,
            "growth": to_json(&growth),
            "inclusion_sweeps": to_json(&sweeps),
            "measured_n1_stable": n1_stable,
            "separation": to_json(&separation),
        }),
    ))
}

fn cmd_dilatation(cfg: &RunConfig) -> Result<(bool, Value)> {
    let piece: Box<dyn QrPiece> = match cfg.shift {
        Some(w) => Box::new(build_rho(w)?),
        None => Box::new(build_g(cfg.degree, disc_radius(cfg.degree))?),
    };
    let rep = estimate_dilatation(piece.as_ref(), cfg.grid_res)?;
    let pass = rep.sup_mu < 1.0 && rep.sup_k.is_finite() && rep.seam_jump < 1e-6;
    Ok((pass, json!({ "dilatation": to_json(&rep), "declared_bound": piece.declared_bound() })))
}

fn start_parameters(cfg: &RunConfig) -> ParameterSequence {
    ParameterSequence::constant(cfg.toy_params.first_index, cfg.w0)
}

fn cmd_solve(cfg: &RunConfig) -> Result<(bool, Value)> {
    let inst = ToyInstance::build(&cfg.instance(), &start_parameters(cfg))?;
    let grid = &inst.phi.grid;
    let path = cfg.field_path();
    let bytes = map_to_bytes(grid);
    write_atomic(&path, &bytes)?;
    let orientation = grid.orientation_fraction();
    Ok((
        orientation == 1.0,
        json!({
            "grid": { "nx": grid.grid.nx, "ny": grid.grid.ny, "bbox": to_json(&grid.grid.bbox) },
            "terms": inst.solve_terms,
            "final_residual": grid.residuals.last().copied(),
            "orientation_fraction": orientation,
            "field": { "path": path.display().to_string(), "sha256": sha256_hex(&bytes) },
        }),
    ))
}

/// Orbit of `start` under `f`, written as CSV; the record goes into the report.
fn dump_orbit<F>(cfg: &RunConfig, f: F, start: C64) -> Result<Value>
where
    F: Fn(C64) -> Result<C64>,
{
    let rec = iterate_orbit(f, start, cfg.max_iter as usize, cfg.bailout)?;
    let path = cfg.orbit_path();
    let csv = orbit_csv(&rec.points);
    write_atomic(&path, csv.as_bytes())?;
    Ok(json!({
        "path": path.display().to_string(),
        "sha256": sha256_hex(csv.as_bytes()),
        "classification": to_json(&rec.classification),
        "escape_index": rec.escape_index,
        "flag": rec.flag,
    }))
}

fn cmd_shoot(cfg: &RunConfig) -> Result<(bool, Value)> {
    let inst_cfg = cfg.instance();
    let rep = shoot(&inst_cfg, &start_parameters(cfg), cfg.shoot_tol, cfg.max_shoot_iter)?;
    let inst = ToyInstance::build(&inst_cfg, &rep.w_star)?;
    // recomputed from scratch on the final instance
    let mut residual: f64 = 0.0;
    let mut landing = Vec::new();
    for n in inst.first_index()..=inst.last_index() {
        let chain = center_chain(n, &inst)?;
        if n > inst.first_index() {
            residual = residual.max((inst.w.get(n - 1) - chain.c_n).norm());
        }
        landing.push(json!({ "n": n, "c_n": to_json(&chain.c_n), "chain_residual": chain.residual }));
    }
    let containment = containment_suite(&inst, 1.0)?;
    let inclusions = verify_inclusions(&inst, 200)?;
    let orbit = match cfg.orbit_start {
        Some(z) => Some(dump_orbit(cfg, |z| inst.f(z), z)?),
        None => None,
    };
    let w_star: Vec<C64> = (inst.first_index()..inst.last_index()).map(|n| inst.w.get(n)).collect();
    let pass = rep.converged && rep.contraction < 1.0 && containment.pass;
    Ok((
        pass,
        json!({
            "w_star": to_json(&w_star),
            "converged": rep.converged,
            "iterations": rep.iterations,
            "contraction": rep.contraction,
            "residual": rep.residual,
            "residual_recomputed": residual,
            "history": rep.history.iter().map(|h| h.residual).collect::<Vec<_>>(),
            "excursions": to_json(&rep.excursions),
            "centers": landing,
            "containment": to_json(&containment),
            // informational: the positive-margin inclusion needs larger degrees than the default toy
            "inclusions": to_json(&inclusions),
            "orbit": orbit,
        }),
    ))
}

fn cmd_render(cfg: &RunConfig) -> Result<(bool, Value)> {
    let (field, orbit) = match cfg.render_map {
        RenderMap::Base => {
            let field = escape_time_field(g_eval, cfg.window, cfg.width, cfg.height, cfg.max_iter, cfg.bailout)?;
            let orbit = cfg.orbit_start.map(|z| dump_orbit(cfg, g_eval, z)).transpose()?;
            (field, orbit)
        }
        RenderMap::Toy => {
            let inst = ToyInstance::build(&cfg.instance(), &start_parameters(cfg))?;
            let f = |z| inst.f_fast(z);
            let field = escape_time_field(f, cfg.window, cfg.width, cfg.height, cfg.max_iter, cfg.bailout)?;
            let orbit = cfg.orbit_start.map(|z| dump_orbit(cfg, f, z)).transpose()?;
            (field, orbit)
        }
    };
    let bytes = ppm_bytes(&field);
    let path = cfg.image_path();
    write_atomic(&path, &bytes)?;
    let interior = field.counts.iter().filter(|&&k| k == crate::dynamics::ESCAPE_INTERIOR).count();
    let failed = field.counts.iter().filter(|&&k| k == crate::dynamics::ESCAPE_FAILED).count();
    Ok((
        true,
        json!({
            "image": { "path": path.display().to_string(), "sha256": sha256_hex(&bytes), "width": field.width, "height": field.height },
            "interior_pixels": interior,
            "failed_pixels": failed,
            "orbit": orbit,
        }),
    ))
}

/// Three discs satisfying the separation hypotheses for `delta1`.
fn sample_family<R: Rng>(rng: &mut R, delta1: f64, k: f64) -> DiscFamily {
    let cap = delta1.min(0.25);
    let discs = (0..3)
        .map(|_| {
            let center = C64::from_polar(rng.gen_range(5.0..30.0), rng.gen_range(0.0..6.3));
            Disc { center, radius: rng.gen_range(0.1..1.0) * cap * center.norm() }
        })
        .collect();
    DiscFamily { discs, k }
}

fn cmd_report(cfg: &RunConfig) -> Result<(bool, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut worst_pole: f64 = 0.0;
    for _ in 0..cfg.samples {
        let (alpha, r, beta) = random_pole_case(&mut rng);
        worst_pole = worst_pole.max(disc_pole_integral(alpha, r, beta) / (2.0 * PI * r));
    }
    let equality = disc_pole_integral(c(0.0, 0.0), 1.0, c(0.0, 0.0)) / (2.0 * PI);
    let pole_pass = worst_pole <= 1.0 + 1e-3 && (equality - 1.0).abs() < 1e-3;
    let mut cases = Vec::new();
    let mut case_pass = true;
    for near in [true, false] {
        let mut worst: f64 = 0.0;
        let mut mislabelled = 0;
        for _ in 0..cfg.samples {
            let (beta, gamma, disc) = random_case_config(&mut rng, near, CASE_HEIGHT, CASE_ETA);
            let case = key_case(beta, &disc, CASE_HEIGHT, CASE_ETA);
            if (case == KeyCase::Near) != near {
                mislabelled += 1;
            }
            let v = disc_key_integral(c(0.0, 0.0), beta, gamma, &disc);
            worst = worst.max(v / case_bound(case, &disc, CASE_HEIGHT, CASE_ETA));
        }
        case_pass &= worst <= 1.0 && mislabelled == 0;
        cases.push(json!({ "case": if near { "near" } else { "far" }, "worst_ratio": worst, "mislabelled": mislabelled }));
    }
    let family = sample_family(&mut rng, cfg.delta1, cfg.k_const);
    let assumption = check_assumption(&family, cfg.delta1);
    let alpha = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let beta = alpha + C64::from_polar(rng.gen_range(2.0..20.0), rng.gen_range(0.0..6.3));
    let gamma = alpha + (beta - alpha) * C64::from_polar(rng.gen_range(0.1..1.0) * cfg.delta1, rng.gen_range(0.0..6.3));
    let consts = KeyConstants { delta1: cfg.delta1, c: cfg.c_const };
    let key = key_inequality_rhs(alpha, beta, gamma, &family, consts)?;
    Ok((
        pole_pass && case_pass && assumption.passed(),
        json!({
            "pole_bound": { "cases": cfg.samples, "worst_ratio": worst_pole, "equality_ratio": equality, "pass": pole_pass },
            "case_bounds": cases,
            "family": to_json(&family),
            "assumption": to_json(&assumption),
            "key_inequality": { "alpha": to_json(&alpha), "beta": to_json(&beta), "gamma": to_json(&gamma), "report": to_json(&key) },
        }),
    ))
}

fn dispatch(cfg: &RunConfig) -> Result<(bool, Value)> {
    match cfg.command {
        Command::Schedule => cmd_schedule(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Dilatation => cmd_dilatation(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::Shoot => cmd_shoot(cfg),
        Command::Render => cmd_render(cfg),
        Command::Report => cmd_report(cfg),
    }
}

/// Runs one validated config and writes its report.
///
/// Numerical errors count as suite failures and are recorded in the report;
/// I/O errors are returned so the caller can exit with [`EXIT_IO`].
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let (pass, result, error) = match dispatch(cfg) {
        Ok((pass, result)) => (pass, result, None),
        Err(e @ QrwdError::Io(_)) => return Err(e),
        Err(e) => (false, Value::Null, Some(e.to_string())),
    };
    let report = json!({
        "qrwd_version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "config": to_json(cfg),
        "pass": pass,
        "error": error,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_atomic(&cfg.report_path(), text.as_bytes())?;
    Ok(Outcome { pass, report, exit_code: if pass { EXIT_PASS } else { EXIT_FAIL } })
}

/// Full command-line flow; returns the process exit code.
pub fn run_command(args: &[String]) -> i32 {
    let (config_path, flags) = match parse_args(args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("usage error: {e}");
            eprintln!("usage: qrwd <schedule|verify|dilatation|solve|shoot|render|report> [--config path] [--key value ...]");
            return EXIT_USAGE;
        }
    };
    let text = match config_path {
        Some(p) => match std::fs::read_to_string(Path::new(&p)) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("cannot read config {p}: {e}");
                return EXIT_IO;
            }
        },
        None => None,
    };
    let cfg = match parse_config(text.as_deref(), &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_USAGE;
        }
    };
    match run(&cfg) {
        Ok(out) => {
            println!("{} {} -> {}", cfg.command.name(), if out.pass { "PASS" } else { "FAIL" }, cfg.report_path().display());
            if let Some(err) = out.report.get("error").and_then(Value::as_str) {
                eprintln!("error: {err}");
            }
            out.exit_code
        }
        Err(e) => {
            eprintln!("{e}");
            EXIT_IO
        }
    }
}
