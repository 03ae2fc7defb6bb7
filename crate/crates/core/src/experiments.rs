//! Entry points behind the command-line subcommands.
//!
//! Each function runs one experiment from a validated configuration and
//! returns a [`Report`] holding its tables and structured results; writing
//! them is left to [`crate::output::write_outputs`].

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::coefficients::{check_constraints, FamilyChoice};
use crate::config::{ExperimentConfig, RgnStart};
use crate::consistency::regime_scan;
use crate::error::{Error, Result};
use crate::harness::{converge, matched_initial_data, rate_fit, PairModels};
use crate::output::{DataTable, Report};
use crate::reconstruct::reconstruct_pair;
use crate::rgn::{integrate, Termination, WaveState};
use crate::stats::LinearFit;

/// Tolerance of the constraint report printed by `coeffs`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

fn to_json<S: Serialize>(value: &S) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::Serialization(e.to_string()))
}

fn report(command: &str, config: Option<&ExperimentConfig>, results: serde_json::Value) -> Report {
    Report {
        command: command.into(),
        config: config.cloned(),
        seed: None,
        results,
        tables: Vec::new(),
    }
}

/// Coefficient set of `family` at `omega` with its constraint report.
pub fn coefficients(family: FamilyChoice, omega: f64) -> Result<Report> {
    let set = family.build(omega)?;
    let constraints = check_constraints(&set, CONSTRAINT_TOLERANCE);
    let results = json!({
        "coefficients": to_json(&set)?,
        "constraints": {
            "tolerance": constraints.tolerance,
            "all_hold": constraints.all_hold(),
            "max_residual": constraints.max_residual(),
            "violations": constraints.violations(),
            "checks": to_json(&constraints.checks)?,
        },
    });
    Ok(report("coeffs", None, results))
}

fn relative_drift(series: &[f64]) -> f64 {
    let first = series.first().copied().unwrap_or(0.0);
    let worst = series.iter().map(|v| (v - first).abs()).fold(0.0, f64::max);
    if first != 0.0 {
        worst / first.abs()
    } else {
        worst
    }
}

/// Integrates the scalar model from the configured profile.
pub fn simulate_rch(config: &ExperimentConfig) -> Result<Report> {
    let grid = config.build_grid::<f64>()?;
    let spec = config.pair_spec(config.physical, config.time);
    let models = PairModels::new(&spec, &grid)?;
    let w0 = config.initial_profile(&grid)?;
    let traj = models.scalar.integrate(&w0, &config.time)?;
    let mut table = DataTable::csv("trajectory.csv", &["t", "x", "w"]);
    let mut diag_table = DataTable::csv("diagnostics.csv", &["t", "mass", "h1_invariant", "max_abs"]);
    let points = grid.points();
    let (mut mass, mut inv, mut amp) = (vec![], vec![], vec![]);
    for (t, w) in traj.times.iter().zip(&traj.states) {
        for (x, v) in points.iter().zip(w.values()) {
            table.push(vec![*t, *x, *v]);
        }
        let d = models.scalar.diagnostics(w)?;
        diag_table.push(vec![*t, d.mass, d.h1_invariant, d.max_abs]);
        mass.push(d.mass);
        inv.push(d.h1_invariant);
        amp.push(d.max_abs);
    }
    let mass_drift = mass.iter().map(|m| (m - mass[0]).abs()).fold(0.0, f64::max);
    let results = json!({
        "family": config.family().name(),
        "coefficients": to_json(&models.scalar.coeffs)?,
        "times": traj.times,
        "mass_drift": mass_drift,
        "invariant_relative_drift": relative_drift(&inv),
        "max_amplitude": amp.iter().copied().fold(0.0, f64::max),
        "diagnostics": { "mass": mass, "h1_invariant": inv, "max_abs": amp },
    });
    let mut r = report("simulate-rch", Some(config), results);
    r.tables = vec![table, diag_table];
    Ok(r)
}

/// The Green-Naghdi starting state selected by `[initial] rgn_start`.
pub fn rgn_initial_state(config: &ExperimentConfig) -> Result<WaveState<f64>> {
    let grid = config.build_grid::<f64>()?;
    let w0 = config.initial_profile(&grid)?;
    Ok(match config.initial.rgn_start {
        RgnStart::Matched => {
            let spec = config.pair_spec(config.physical, config.time);
            matched_initial_data(&w0, &PairModels::new(&spec, &grid)?)?.1
        }
        RgnStart::SurfaceOnly => WaveState {
            u: w0.scale(0.0),
            eta: w0,
            t: 0.0,
        },
        RgnStart::Equal => WaveState {
            eta: w0.clone(),
            u: w0,
            t: 0.0,
        },
    })
}

/// Integrates the Green-Naghdi system from the configured state. An early
/// stop on a monitor breach is a result, not an error.
pub fn simulate_rgn(config: &ExperimentConfig) -> Result<Report> {
    let grid = config.build_grid::<f64>()?;
    let spec = config.rgn_spec(config.physical, &grid)?;
    let state0 = rgn_initial_state(config)?;
    let traj = integrate(&state0, &config.time, &spec)?;
    let mut table = DataTable::csv("trajectory.csv", &["t", "x", "eta", "u"]);
    let mut mon = DataTable::csv(
        "monitors.csv",
        &["t", "energy", "min_depth", "min_coriolis", "xs_norm"],
    );
    let points = grid.points();
    for st in &traj.states {
        for ((x, e), u) in points.iter().zip(st.eta.values()).zip(st.u.values()) {
            table.push(vec![st.t, *x, *e, *u]);
        }
    }
    for (m, e) in traj.monitors.iter().zip(&traj.energy) {
        mon.push(vec![m.t, *e, m.min_depth, m.min_coriolis, m.xs_norm]);
    }
    let cause = match &traj.termination {
        Termination::Completed => None,
        Termination::BlowUpDetected { cause, .. } => Some(cause.describe()),
    };
    let results = json!({
        "times": traj.times(),
        "energy": traj.energy,
        "energy_relative_drift": relative_drift(&traj.energy),
        "monitors": to_json(&traj.monitors)?,
        "termination": to_json(&traj.termination)?,
        "termination_cause": cause,
        "max_cg_iterations": traj.max_cg_iterations,
    });
    let mut r = report("simulate-rgn", Some(config), results);
    r.tables = vec![table, mon];
    Ok(r)
}

fn slope_verdict(fit: Option<&LinearFit>, config: &ExperimentConfig) -> serde_json::Value {
    let e = &config.experiment;
    match fit {
        Some(f) => json!({
            "slope": f.slope,
            "r_squared": f.r_squared,
            "target": e.target_slope,
            "tolerance": e.slope_tolerance,
            "within_tolerance": (f.slope - e.target_slope).abs() <= e.slope_tolerance,
        }),
        None => serde_json::Value::Null,
    }
}

/// Residual scan of the configured family over `[experiment] mu_list`.
pub fn consistency(config: &ExperimentConfig) -> Result<Report> {
    let grid = config.build_grid::<f64>()?;
    let u0 = config.initial_profile(&grid)?;
    let scan = regime_scan(&config.scan_spec(), &u0)?;
    let mut table = DataTable::csv("scan.csv", &["mu", "epsilon", "t", "r1_norm", "r2_norm"]);
    for p in &scan.points {
        table.push(vec![p.mu, p.epsilon, p.t, p.r1_norm, p.r2_norm]);
    }
    let results = json!({
        "scan": to_json(&scan)?,
        "fit": slope_verdict(scan.fit.as_ref(), config),
    });
    let mut r = report("consistency", Some(config), results);
    r.tables = vec![table];
    Ok(r)
}

/// Matched-pair convergence study over `mu_list x omega_list`.
pub fn convergence(config: &ExperimentConfig) -> Result<Report> {
    let grid = config.build_grid::<f64>()?;
    let u0 = config.initial_profile(&grid)?;
    let rep = converge(&u0, &config.pair_specs());
    let mut table = DataTable::csv("converge.csv", &["mu", "epsilon", "omega", "t", "err_u", "err_eta"]);
    let mut tables = Vec::new();
    let mut per_omega: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut entries = Vec::new();
    for (i, e) in rep.entries.iter().enumerate() {
        let mut dump = DataTable::columns(dump_name(i), &["t", "running_max"]);
        for k in 0..e.times.len() {
            table.push(vec![e.mu, e.epsilon, e.omega, e.times[k], e.err_u[k], e.err_eta[k]]);
            dump.push(vec![e.times[k], e.running_max[k]]);
        }
        tables.push(dump);
        let horizon = config.experiment.horizon / e.epsilon;
        let final_error = e.error_at(horizon);
        if let Some(err) = final_error.filter(|v| *v > 0.0) {
            per_omega.entry(e.omega.to_bits()).or_default().push((e.mu, err));
        }
        entries.push(json!({
            "file": dump_name(i),
            "mu": e.mu,
            "epsilon": e.epsilon,
            "omega": e.omega,
            "horizon_time": horizon,
            "error_at_horizon": final_error,
            "c_est": e.c_est,
            "truncated": to_json(&e.truncated)?,
        }));
    }
    let mut fits = Vec::new();
    for (bits, pts) in &per_omega {
        let fit = rate_fit(pts).ok();
        fits.push(json!({
            "omega": f64::from_bits(*bits),
            "fit": slope_verdict(fit.as_ref(), config),
        }));
    }
    let cs: Vec<f64> = rep.entries.iter().filter_map(|e| e.c_est).collect();
    let c_spread = match (cs.iter().copied().reduce(f64::max), cs.iter().copied().reduce(f64::min)) {
        (Some(hi), Some(lo)) if lo > 0.0 => Some(hi / lo),
        _ => None,
    };
    let results = json!({
        "horizon": config.experiment.horizon,
        "derivative_count": config.experiment.derivative_count,
        "entries": entries,
        "failures": rep.failures.iter().map(|(mu, omega, msg)| json!({"mu": mu, "omega": omega, "error": msg})).collect::<Vec<_>>(),
        "rate_fits": fits,
        "c_spread": c_spread,
    });
    let mut r = report("converge", Some(config), results);
    r.tables = std::iter::once(table).chain(tables).collect();
    Ok(r)
}

fn dump_name(i: usize) -> String {
    format!("pair_{i:03}.dat")
}

/// Reconstructed Green-Naghdi pair of the configured profile.
pub fn reconstruct(config: &ExperimentConfig) -> Result<Report> {
    let grid = config.build_grid::<f64>()?;
    let spec = config.pair_spec(config.physical, config.time);
    let models = PairModels::new(&spec, &grid)?;
    let w = config.initial_profile(&grid)?;
    let pair = reconstruct_pair(&models.scalar, &w, &models.reconstruction)?;
    let mut table = DataTable::csv("reconstruct.csv", &["x", "w", "eta", "eta_t", "u", "u_t"]);
    let cols = [&w, &pair.eta, &pair.eta_t, &pair.u, &pair.u_t];
    for (i, x) in grid.points().iter().enumerate() {
        let mut row = vec![*x];
        row.extend(cols.iter().map(|f| f.values()[i]));
        table.push(row);
    }
    let results = json!({
        "family": config.family().name(),
        "max_abs": {
            "w": w.max_abs(),
            "eta": pair.eta.max_abs(),
            "u": pair.u.max_abs(),
        },
    });
    let mut r = report("reconstruct", Some(config), results);
    r.tables = vec![table];
    Ok(r)
}
