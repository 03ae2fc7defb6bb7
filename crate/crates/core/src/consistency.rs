//! Residuals of `(eta, u)` families against the rotating Green-Naghdi
//! system in its original (non-elliptic) form, and their scaling with `mu`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{FamilyChoice, PhysicalParams};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::rch::ScalarModel;
use crate::reconstruct::{reconstruct_pair, ReconstructionSpec, ThetaConvention};
use crate::scalar::Real;
use crate::stats::{log_log_fit, LinearFit};
use crate::time::TimeGrid;

/// Smallest `mu` accepted by [`rgn_residual`].
pub const MU_GUARD: f64 = 1e-12;

/// Residuals of both equations divided by `mu^2`, with their `H^s` norms.
#[derive(Clone, Debug)]
pub struct ResidualPair<T: Real> {
    pub r1: Field<T>,
    pub r2: Field<T>,
    pub s: f64,
    pub norms: (f64, f64),
    pub mu: f64,
}

impl<T: Real> ResidualPair<T> {
    /// Norms of the residuals before division by `mu^2`.
    pub fn raw_norms(&self) -> (f64, f64) {
        let m2 = self.mu * self.mu;
        (self.norms.0 * m2, self.norms.1 * m2)
    }
}

/// Residuals `r1 = [eta_t + (h u)_x] / mu^2` and
/// `r2 = [u_t + eta_x + eps u u_x + 2 omega eta_t
///   - mu/(3h) (h^3 (u_xt + eps u u_xx - eps u_x^2))_x] / mu^2`
/// with `h = 1 + eps eta`, normed in `H^s`.
pub fn rgn_residual<T: Real>(
    eta: &Field<T>,
    eta_t: &Field<T>,
    u: &Field<T>,
    u_t: &Field<T>,
    params: &PhysicalParams,
    s: f64,
) -> Result<ResidualPair<T>> {
    Field::check_same_grid(&[eta, eta_t, u, u_t])?;
    if !(params.mu >= MU_GUARD) {
        return Err(Error::Domain(format!(
            "residual normalization needs mu >= {MU_GUARD}, got {}",
            params.mu
        )));
    }
    let eps = T::lit(params.epsilon);
    let mu = T::lit(params.mu);
    let om = T::lit(params.omega);
    let h = eta.scale(eps).shift(T::one());
    let ux = u.deriv(1)?;
    let raw1 = eta_t + &h.product(u).deriv(1)?;
    let inner = u_t
        .deriv(1)?
        .axpy(eps, &u.product(&u.deriv(2)?))
        .axpy(-eps, &ux.product(&ux));
    let h3 = h.product(&h).product(&h);
    let disp = h3.product(&inner).deriv(1)?;
    let disp_over_h = Field::from_values(
        h.grid(),
        disp.values().iter().zip(h.values()).map(|(&d, &hh)| d / hh).collect(),
    )?;
    let raw2 = u_t
        .axpy(T::one(), &eta.deriv(1)?)
        .axpy(eps, &u.product(&ux))
        .axpy(T::lit(2.0) * om, eta_t)
        .axpy(-mu / T::lit(3.0), &disp_over_h);
    let scale = T::one() / (mu * mu);
    let (r1, r2) = (raw1.scale(scale), raw2.scale(scale));
    let st = T::lit(s);
    let norms = (r1.sobolev_norm(st).as_f64(), r2.sobolev_norm(st).as_f64());
    Ok(ResidualPair {
        r1,
        r2,
        s,
        norms,
        mu: params.mu,
    })
}

/// Settings of a consistency scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanSpec {
    pub family: FamilyChoice,
    pub omega: f64,
    /// Shallowness values, descending.
    pub mu_list: Vec<f64>,
    /// `eps = m sqrt(mu)`.
    pub m: f64,
    /// Sobolev index of the residual norms.
    pub s: f64,
    /// Probe times as multiples of `1/eps`.
    pub probe_factors: Vec<f64>,
    pub dt: f64,
    pub theta_convention: ThetaConvention,
}

/// One `(mu, t)` sample of a scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub mu: f64,
    pub epsilon: f64,
    pub t: f64,
    pub r1_norm: f64,
    pub r2_norm: f64,
    pub raw_r1_norm: f64,
    pub raw_r2_norm: f64,
}

impl ScanPoint {
    /// `sqrt(|r1|^2 + |r2|^2)` before normalization.
    pub fn raw_total(&self) -> f64 {
        self.raw_r1_norm.hypot(self.raw_r2_norm)
    }

    /// `sqrt(|r1|^2 + |r2|^2)` after division by `mu^2`.
    pub fn normalized_total(&self) -> f64 {
        self.r1_norm.hypot(self.r2_norm)
    }
}

/// A failed scan entry.
#[derive(Clone, Debug, Serialize)]
pub struct ScanFailure {
    pub mu: f64,
    pub error: String,
}

/// Result of [`regime_scan`].
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    pub failures: Vec<ScanFailure>,
    /// Fit of the largest raw residual over the probe times against `mu`;
    /// `None` when fewer than two `mu` values succeeded.
    pub fit: Option<LinearFit>,
    /// Per probe factor fits of the raw residual.
    pub probe_fits: Vec<(f64, Option<LinearFit>)>,
    /// Largest over smallest normalized residual across the sweep.
    pub normalized_spread: Option<f64>,
}

fn scan_one<T: Real>(
    spec: &ScanSpec,
    mu: f64,
    grid: &Arc<Grid<T>>,
    u0: &Field<T>,
) -> Result<Vec<ScanPoint>> {
    let epsilon = spec.m * mu.sqrt();
    let params = PhysicalParams {
        epsilon,
        mu,
        omega: spec.omega,
        ..PhysicalParams::default()
    };
    let coeffs = spec.family.build(spec.omega)?;
    let model = ScalarModel::new(coeffs.map(T::lit), params, Arc::clone(grid))?;
    let rspec = ReconstructionSpec {
        coeffs: model.coeffs,
        params,
        theta_convention: spec.theta_convention,
    };
    let mut probes: Vec<f64> = spec.probe_factors.iter().map(|f| f / epsilon).collect();
    probes.sort_by(|a, b| a.total_cmp(b));
    let mut w = u0.clone();
    let mut t = 0.0;
    let mut out = vec![];
    for tp in probes {
        if tp > t {
            let traj = model.integrate(
                &w,
                &TimeGrid {
                    t_end: tp - t,
                    dt: spec.dt,
                    dt_out: tp - t,
                },
            )?;
            w = traj.states.into_iter().last().expect("final state");
            t = tp;
        }
        let pair = reconstruct_pair(&model, &w, &rspec)?;
        let r = rgn_residual(&pair.eta, &pair.eta_t, &pair.u, &pair.u_t, &params, spec.s)?;
        let raw = r.raw_norms();
        out.push(ScanPoint {
            mu,
            epsilon,
            t,
            r1_norm: r.norms.0,
            r2_norm: r.norms.1,
            raw_r1_norm: raw.0,
            raw_r2_norm: raw.1,
        });
    }
    Ok(out)
}

/// Integrates the scalar family from `u0` for each `mu`, reconstructs the
/// Green-Naghdi pair at each probe time and records the residuals.
///
/// Grid points run concurrently; failures are reported per point.
pub fn regime_scan<T: Real>(spec: &ScanSpec, u0: &Field<T>) -> Result<ScanReport> {
    if spec.mu_list.is_empty() {
        return Err(Error::Domain("mu list is empty".into()));
    }
    if spec.mu_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Domain("mu list must be strictly descending".into()));
    }
    if spec.probe_factors.iter().any(|f| !(*f >= 0.0)) {
        return Err(Error::Domain("probe factors must be non-negative".into()));
    }
    let grid = Arc::clone(u0.grid());
    let results: Vec<(f64, Result<Vec<ScanPoint>>)> = spec
        .mu_list
        .par_iter()
        .map(|&mu| (mu, scan_one(spec, mu, &grid, u0)))
        .collect();
    let mut points = vec![];
    let mut failures = vec![];
    for (mu, r) in results {
        match r {
            Ok(p) => points.extend(p),
            Err(e) => failures.push(ScanFailure {
                mu,
                error: e.to_string(),
            }),
        }
    }
    let per_mu: Vec<(f64, f64, f64)> = spec
        .mu_list
        .iter()
        .filter_map(|&mu| {
            let pts: Vec<&ScanPoint> = points.iter().filter(|p| p.mu == mu).collect();
            if pts.is_empty() {
                return None;
            }
            let raw = pts.iter().map(|p| p.raw_total()).fold(0.0, f64::max);
            let norm = pts.iter().map(|p| p.normalized_total()).fold(0.0, f64::max);
            Some((mu, raw, norm))
        })
        .collect();
    let fit = log_log_fit(&per_mu.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>()).ok();
    let probe_fits = spec
        .probe_factors
        .iter()
        .map(|&f| {
            let pts: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| ((p.t * p.epsilon) - f).abs() < 1e-9 * f.max(1.0))
                .map(|p| (p.mu, p.raw_total()))
                .collect();
            (f, log_log_fit(&pts).ok())
        })
        .collect();
    let normalized_spread = if per_mu.is_empty() {
        None
    } else {
        let hi = per_mu.iter().map(|p| p.2).fold(0.0, f64::max);
        let lo = per_mu.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
        Some(hi / lo)
    };
    Ok(ScanReport {
        points,
        failures,
        fit,
        probe_fits,
        normalized_spread,
    })
}
