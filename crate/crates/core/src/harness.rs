//! Matched scalar-model and Green-Naghdi runs. Measures how far the two
//! drift apart and fits rates to those measurements. Also estimates
//! perturbation growth.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{FamilyChoice, PhysicalParams};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::rch::ScalarModel;
use crate::reconstruct::{reconstruct_pair, ReconstructionSpec, ThetaConvention};
use crate::rgn::{integrate, RgnSpec, Termination, WaveState};
use crate::scalar::Real;
use crate::stats::{log_log_fit, origin_fit, LinearFit, OriginFit};
use crate::time::TimeGrid;

/// Earliest time used when estimating the constant of the linear-in-time
/// bound.
pub const C_EST_MIN_TIME: f64 = 1.0;

/// Settings of one matched pair of runs.
#[derive(Clone, Debug, Serialize)]
pub struct PairSpec {
    pub family: FamilyChoice,
    pub params: PhysicalParams,
    pub time: TimeGrid,
    pub theta_convention: ThetaConvention,
    pub b0: f64,
    pub elliptic_tol: f64,
    pub elliptic_maxit: usize,
    pub cfl: f64,
}

impl PairSpec {
    /// Pair settings with the default solver knobs.
    pub fn new(family: FamilyChoice, params: PhysicalParams, time: TimeGrid) -> Self {
        Self {
            family,
            params,
            time,
            theta_convention: ThetaConvention::default(),
            b0: 0.05,
            elliptic_tol: 1e-11,
            elliptic_maxit: 500,
            cfl: 0.5,
        }
    }
}

/// The two models of a pair together with the reconstruction linking them.
pub struct PairModels<T: Real> {
    pub scalar: ScalarModel<T>,
    pub rgn: RgnSpec<T>,
    pub reconstruction: ReconstructionSpec<T>,
}

impl<T: Real> PairModels<T> {
    pub fn new(spec: &PairSpec, grid: &Arc<crate::grid::Grid<T>>) -> Result<Self> {
        let coeffs = spec.family.build(spec.params.omega)?.map(T::lit);
        let mut scalar = ScalarModel::new(coeffs, spec.params, Arc::clone(grid))?;
        scalar.cfl = spec.cfl;
        let mut rgn = RgnSpec::new(spec.params, Arc::clone(grid))?;
        rgn.b0 = spec.b0;
        rgn.elliptic_tol = spec.elliptic_tol;
        rgn.elliptic_maxit = spec.elliptic_maxit;
        rgn.cfl = spec.cfl;
        let reconstruction = ReconstructionSpec {
            coeffs,
            params: spec.params,
            theta_convention: spec.theta_convention,
        };
        Ok(Self {
            scalar,
            rgn,
            reconstruction,
        })
    }
}

/// Initial data of the two runs: the scalar state `u0` and the
/// Green-Naghdi state reconstructed from it.
pub fn matched_initial_data<T: Real>(u0: &Field<T>, models: &PairModels<T>) -> Result<(Field<T>, WaveState<T>)> {
    let pair = reconstruct_pair(&models.scalar, u0, &models.reconstruction)?;
    Ok((
        u0.clone(),
        WaveState {
            eta: pair.eta,
            u: pair.u,
            t: 0.0,
        },
    ))
}

/// Divergence history of one matched pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairEntry {
    pub mu: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub times: Vec<f64>,
    /// `sup |u_GN - u_model|` at each output time.
    pub err_u: Vec<f64>,
    /// `sup |eta_GN - eta_model|` at each output time.
    pub err_eta: Vec<f64>,
    /// Running maximum of `err_u + err_eta` over earlier output times.
    pub running_max: Vec<f64>,
    /// Present when the Green-Naghdi run stopped early.
    pub truncated: Option<Termination>,
    /// `max over t >= 1 of running_max / (mu^2 t)`.
    pub c_est: Option<f64>,
}

impl PairEntry {
    /// Last recorded time.
    pub fn last_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Running-max error at the recorded time nearest to `t`; `None` when
    /// the entry stops before `t`.
    pub fn error_at(&self, t: f64) -> Option<f64> {
        if t > self.last_time() * (1.0 + 1e-9) + 1e-12 {
            return None;
        }
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?
            .0;
        Some(self.running_max[i])
    }

    /// Fit of the running-max error against a line through the origin over
    /// `t in [t_min, t_max]`.
    pub fn origin_line(&self, t_min: f64, t_max: f64) -> Result<OriginFit> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.running_max)
            .filter(|(t, _)| **t >= t_min - 1e-12 && **t <= t_max + 1e-9)
            .map(|(t, e)| (*t, *e))
            .collect();
        origin_fit(&pts)
    }
}

/// Integrates both models from matched data and records their divergence
/// at the shared output times.
pub fn run_pair<T: Real>(u0: &Field<T>, spec: &PairSpec) -> Result<PairEntry> {
    let models = PairModels::new(spec, u0.grid())?;
    let (w0, state0) = matched_initial_data(u0, &models)?;
    let scalar = models.scalar.integrate(&w0, &spec.time)?;
    let rgn = integrate(&state0, &spec.time, &models.rgn)?;
    let truncated = match rgn.termination {
        Termination::Completed => None,
        ref t => Some(t.clone()),
    };
    let mut entry = PairEntry {
        mu: spec.params.mu,
        epsilon: spec.params.epsilon,
        omega: spec.params.omega,
        times: vec![],
        err_u: vec![],
        err_eta: vec![],
        running_max: vec![],
        truncated,
        c_est: None,
    };
    let mut running = 0.0f64;
    for (w, gn) in scalar.states.iter().zip(&rgn.states) {
        let pair = reconstruct_pair(&models.scalar, w, &models.reconstruction)?;
        let eu = (&gn.u - &pair.u).max_abs().as_f64();
        let ee = (&gn.eta - &pair.eta).max_abs().as_f64();
        running = running.max(eu + ee);
        entry.times.push(gn.t);
        entry.err_u.push(eu);
        entry.err_eta.push(ee);
        entry.running_max.push(running);
    }
    let mu2 = spec.params.mu * spec.params.mu;
    entry.c_est = entry
        .times
        .iter()
        .zip(&entry.running_max)
        .filter(|(t, _)| **t >= C_EST_MIN_TIME)
        .map(|(t, e)| e / (mu2 * t))
        .reduce(f64::max);
    Ok(entry)
}

/// Least-squares fit of `ln err` against `ln mu`.
///
/// Needs at least three distinct `mu` values.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    let mut mus: Vec<f64> = points.iter().map(|p| p.0).collect();
    mus.sort_by(|a, b| a.total_cmp(b));
    mus.dedup();
    if mus.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "a rate fit needs three distinct mu values, got {}",
            mus.len()
        )));
    }
    log_log_fit(points)
}

/// All pair runs of a convergence study, sorted by `(mu, omega)`.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub entries: Vec<PairEntry>,
    pub failures: Vec<(f64, f64, String)>,
}

/// Runs every pair concurrently.
pub fn converge<T: Real>(u0: &Field<T>, specs: &[PairSpec]) -> ConvergenceReport {
    let results: Vec<(f64, f64, Result<PairEntry>)> = specs
        .par_iter()
        .map(|s| (s.params.mu, s.params.omega, run_pair(u0, s)))
        .collect();
    let mut entries = vec![];
    let mut failures = vec![];
    for (mu, omega, r) in results {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => failures.push((mu, omega, e.to_string())),
        }
    }
    entries.sort_by(|a, b| a.mu.total_cmp(&b.mu).then(a.omega.total_cmp(&b.omega)));
    failures.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    ConvergenceReport { entries, failures }
}

/// `X^s` norm of the difference of two states.
pub fn xs_distance<T: Real>(a: &WaveState<T>, b: &WaveState<T>, mu: f64, s: f64) -> Result<f64> {
    let de = &a.eta - &b.eta;
    let du = &a.u - &b.u;
    let dux = du.deriv(1)?;
    let st = T::lit(s);
    let sq = |f: &Field<T>| f.sobolev_norm(st).as_f64().powi(2);
    Ok((sq(&de) + sq(&du) + mu * sq(&dux)).sqrt())
}

/// Separation history of two Green-Naghdi runs.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationSeries {
    pub epsilon: f64,
    pub delta: f64,
    pub times: Vec<f64>,
    /// `X^1` distance between the runs.
    pub separation: Vec<f64>,
}

impl SeparationSeries {
    /// Smallest `K` with `separation(t) <= delta exp(K eps t)` for all
    /// recorded `t >= t_min`.
    pub fn growth_constant(&self, t_min: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.separation)
            .filter(|(t, _)| **t >= t_min && **t > 0.0)
            .map(|(t, s)| (s / self.delta).ln() / (self.epsilon * t))
            .reduce(f64::max)
    }
}

/// Runs `state0` and `state0 + delta * direction / |direction|_{X^1}` and
/// records their `X^1` separation.
pub fn separation_series<T: Real>(
    state0: &WaveState<T>,
    direction: &WaveState<T>,
    delta: f64,
    time: &TimeGrid,
    spec: &RgnSpec<T>,
) -> Result<SeparationSeries> {
    let zero = WaveState::zeros(state0.eta.grid());
    let norm = xs_distance(direction, &zero, spec.params.mu, 1.0)?;
    if !(norm > 0.0) {
        return Err(Error::Domain("perturbation direction is zero".into()));
    }
    let a = T::lit(delta / norm);
    let perturbed = WaveState {
        eta: state0.eta.axpy(a, &direction.eta),
        u: state0.u.axpy(a, &direction.u),
        t: 0.0,
    };
    let (r1, r2) = rayon::join(
        || integrate(state0, time, spec),
        || integrate(&perturbed, time, spec),
    );
    let (r1, r2) = (r1?, r2?);
    let mut series = SeparationSeries {
        epsilon: spec.params.epsilon,
        delta,
        times: vec![],
        separation: vec![],
    };
    for (x, y) in r1.states.iter().zip(&r2.states) {
        series.times.push(x.t);
        series.separation.push(xs_distance(x, y, spec.params.mu, 1.0)?);
    }
    Ok(series)
}
