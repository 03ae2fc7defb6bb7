//! The rotating Green-Naghdi system in elliptic form.
//!
//! With `h = 1 + eps eta` the system reads
//!
//! ```text
//! eta_t = -(h u)_x
//! T[h](u_t + eps u u_x) + h eta_x - 2 omega (h^2 u_x + eps h u eta_x)
//!   + eps mu (2/3) (h^3 u_x^2)_x = 0
//! ```
//!
//! Here `T[h] f = h f - (mu/3) (h^3 f_x)_x` is symmetric positive definite
//! and is inverted by preconditioned conjugate gradients.

use std::sync::Arc;

use serde::Serialize;

use crate::coefficients::PhysicalParams;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::Real;
use crate::time::{rk4_step, OdeState, TimeGrid};

/// Surface elevation and averaged velocity at one instant.
#[derive(Clone, Debug)]
pub struct WaveState<T: Real> {
    pub eta: Field<T>,
    pub u: Field<T>,
    pub t: f64,
}

impl<T: Real> OdeState<T> for WaveState<T> {
    fn axpy(&self, a: T, other: &Self) -> Self {
        WaveState {
            eta: self.eta.axpy(a, &other.eta),
            u: self.u.axpy(a, &other.u),
            t: self.t,
        }
    }
}

impl<T: Real> WaveState<T> {
    /// The zero state on `grid`.
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self {
            eta: Field::zeros(grid),
            u: Field::zeros(grid),
            t: 0.0,
        }
    }
}

/// Solver settings for the Green-Naghdi system.
#[derive(Clone, Debug)]
pub struct RgnSpec<T: Real> {
    pub params: PhysicalParams,
    pub grid: Arc<Grid<T>>,
    /// Positivity floor for `1 + eps eta` and `1 - 2 omega eps u`.
    pub b0: f64,
    /// Relative residual tolerance of the elliptic solve.
    pub elliptic_tol: f64,
    pub elliptic_maxit: usize,
    /// CFL constant.
    pub cfl: f64,
    /// Sobolev index of the blow-up norm proxy.
    pub sobolev_s: f64,
    /// Threshold of the norm proxy beyond which a run is stopped.
    pub norm_ceiling: f64,
}

impl<T: Real> RgnSpec<T> {
    /// Settings with the default monitor floor and solver tolerances.
    pub fn new(params: PhysicalParams, grid: Arc<Grid<T>>) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            grid,
            b0: 0.05,
            elliptic_tol: 1e-11,
            elliptic_maxit: 500,
            cfl: 0.5,
            sobolev_s: 2.0,
            norm_ceiling: 1e6,
        })
    }

    fn eps(&self) -> T {
        T::lit(self.params.epsilon)
    }

    fn mu(&self) -> T {
        T::lit(self.params.mu)
    }

    fn omega(&self) -> T {
        T::lit(self.params.omega)
    }

    /// Total depth `1 + eps eta`.
    pub fn depth(&self, eta: &Field<T>) -> Field<T> {
        eta.scale(self.eps()).shift(T::one())
    }
}

fn require_positive<T: Real>(h: &Field<T>) -> Result<()> {
    let m = h.min();
    if !(m > T::zero()) {
        return Err(Error::Positivity(format!("depth minimum {m} is not positive")));
    }
    Ok(())
}

/// `T[h] f = h f - (mu/3) (h^3 f_x)_x`.
pub fn apply_t<T: Real>(h: &Field<T>, mu: T, f: &Field<T>) -> Result<Field<T>> {
    Field::check_same_grid(&[h, f])?;
    require_positive(h)?;
    let h3 = h.map(|v| v * v * v);
    apply_t_cubed(h, &h3, mu, f)
}

fn apply_t_cubed<T: Real>(h: &Field<T>, h3: &Field<T>, mu: T, f: &Field<T>) -> Result<Field<T>> {
    let flux = h3.mul_exact(&f.deriv(1)?).deriv(1)?;
    Ok(h.mul_exact(f).axpy(-mu / T::lit(3.0), &flux))
}

/// Result of [`invert_t`].
#[derive(Clone, Debug)]
pub struct EllipticSolution<T: Real> {
    pub solution: Field<T>,
    pub iterations: usize,
    /// Final relative residual `|T g - rhs| / |rhs|`.
    pub residual: f64,
}

/// Solves `T[h] g = rhs` by conjugate gradients preconditioned with the
/// constant-coefficient operator at the mean depth.
pub fn invert_t<T: Real>(
    h: &Field<T>,
    mu: T,
    rhs: &Field<T>,
    tol: f64,
    maxit: usize,
) -> Result<EllipticSolution<T>> {
    Field::check_same_grid(&[h, rhs])?;
    require_positive(h)?;
    let grid = rhs.grid();
    let rhs_norm = rhs.inner(rhs).sqrt();
    if rhs_norm == T::zero() {
        return Ok(EllipticSolution {
            solution: Field::zeros(grid),
            iterations: 0,
            residual: 0.0,
        });
    }
    let h3 = h.map(|v| v * v * v);
    let hbar = h.mean();
    let pre_b = mu * hbar * hbar * hbar / T::lit(3.0);
    let precondition = |r: &Field<T>| r.helmholtz_solve(hbar, pre_b);
    let target = T::lit(tol) * rhs_norm;

    let mut x = precondition(rhs)?;
    let mut r = rhs - &apply_t_cubed(h, &h3, mu, &x)?;
    let mut z = precondition(&r)?;
    let mut p = z.clone();
    let mut rz = r.inner(&z);
    let mut iterations = 0;
    while r.inner(&r).sqrt() > target {
        if iterations >= maxit {
            return Err(Error::EllipticDivergence {
                iterations,
                residual: (r.inner(&r).sqrt() / rhs_norm).as_f64(),
            });
        }
        let ap = apply_t_cubed(h, &h3, mu, &p)?;
        let step = rz / p.inner(&ap);
        x = x.axpy(step, &p);
        r = r.axpy(-step, &ap);
        z = precondition(&r)?;
        let rz_next = r.inner(&z);
        p = z.axpy(rz_next / rz, &p);
        rz = rz_next;
        iterations += 1;
    }
    let true_residual = rhs - &apply_t_cubed(h, &h3, mu, &x)?;
    Ok(EllipticSolution {
        residual: (true_residual.inner(&true_residual).sqrt() / rhs_norm).as_f64(),
        solution: x,
        iterations,
    })
}

/// `Q[h] u = (2/(3h)) (h^3 u_x^2)_x`.
pub fn q_of_h<T: Real>(h: &Field<T>, u: &Field<T>) -> Result<Field<T>> {
    Field::check_same_grid(&[h, u])?;
    require_positive(h)?;
    let ux = u.deriv(1)?;
    let inner = h.map(|v| v * v * v).product(&ux.product(&ux)).deriv(1)?;
    Ok(inner.zip_div(h).scale(T::lit(2.0 / 3.0)))
}

impl<T: Real> Field<T> {
    fn zip_div(&self, other: &Field<T>) -> Field<T> {
        let v: Vec<T> = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(&a, &b)| a / b)
            .collect();
        Field::from_values(self.grid(), v).expect("same length")
    }
}

/// Well-posedness diagnostics of a state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorReport {
    pub t: f64,
    /// `min(1 + eps eta)`.
    pub min_depth: f64,
    /// `min(1 - 2 omega eps u)`.
    pub min_coriolis: f64,
    /// `(|eta|_s^2 + |u|_s^2 + mu |u_x|_s^2)^(1/2)`.
    pub xs_norm: f64,
    pub depth_breach: bool,
    pub coriolis_breach: bool,
    pub norm_breach: bool,
}

impl MonitorReport {
    pub fn breached(&self) -> bool {
        self.depth_breach || self.coriolis_breach || self.norm_breach
    }
}

/// Why a Green-Naghdi run stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowUpCause {
    /// `1 + eps eta` fell below the floor `b0`.
    DepthFloor,
    /// `1 - 2 omega eps u` fell below the floor `b0`.
    CoriolisFloor,
    /// The `X^s` norm proxy exceeded its ceiling or became non-finite.
    NormGrowth,
}

impl BlowUpCause {
    /// Human-readable statement of the violated condition.
    pub fn describe(&self) -> &'static str {
        match self {
            BlowUpCause::DepthFloor => "depth positivity 1 + eps*eta >= b0 violated",
            BlowUpCause::CoriolisFloor => "rotation positivity 1 - 2*omega*eps*u >= b0 violated",
            BlowUpCause::NormGrowth => "X^s norm proxy exceeded its ceiling",
        }
    }
}

/// How a Green-Naghdi run ended.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    BlowUpDetected {
        time: f64,
        cause: BlowUpCause,
        /// Whether the initial data already violated the condition.
        at_start: bool,
        monitor: MonitorReport,
    },
}

/// Output of [`integrate`].
#[derive(Clone, Debug)]
pub struct RgnTrajectory<T: Real> {
    pub states: Vec<WaveState<T>>,
    pub energy: Vec<f64>,
    pub monitors: Vec<MonitorReport>,
    pub termination: Termination,
    /// Largest CG iteration count used by any stage.
    pub max_cg_iterations: usize,
}

impl<T: Real> RgnTrajectory<T> {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

/// Energy `int (eta^2 + h u^2 + (mu/3) h^3 u_x^2)`.
pub fn energy<T: Real>(state: &WaveState<T>, spec: &RgnSpec<T>) -> Result<f64> {
    let h = spec.depth(&state.eta);
    let ux = state.u.deriv(1)?;
    let h3 = h.map(|v| v * v * v);
    let e = state.eta.inner(&state.eta)
        + h.mul_exact(&state.u).inner(&state.u)
        + spec.mu() / T::lit(3.0) * h3.mul_exact(&ux).inner(&ux);
    Ok(e.as_f64())
}

/// Evaluates the positivity floors and the norm proxy.
pub fn monitor<T: Real>(state: &WaveState<T>, spec: &RgnSpec<T>) -> Result<MonitorReport> {
    let eps = spec.params.epsilon;
    let om = spec.params.omega;
    let min_depth = 1.0 + eps * state.eta.min().as_f64();
    let min_coriolis = if om * eps == 0.0 {
        1.0
    } else {
        1.0 - 2.0 * om * eps * state.u.max().as_f64()
    };
    let s = T::lit(spec.sobolev_s);
    let ux = state.u.deriv(1)?;
    let sq = |v: T| v.as_f64().powi(2);
    let xs = (sq(state.eta.sobolev_norm(s))
        + sq(state.u.sobolev_norm(s))
        + spec.params.mu * sq(ux.sobolev_norm(s)))
    .sqrt();
    Ok(MonitorReport {
        t: state.t,
        min_depth,
        min_coriolis,
        xs_norm: xs,
        depth_breach: !(min_depth >= spec.b0),
        coriolis_breach: !(min_coriolis >= spec.b0),
        norm_breach: !(xs.is_finite() && xs <= spec.norm_ceiling),
    })
}

fn cause_of(m: &MonitorReport) -> BlowUpCause {
    if m.depth_breach {
        BlowUpCause::DepthFloor
    } else if m.coriolis_breach {
        BlowUpCause::CoriolisFloor
    } else {
        BlowUpCause::NormGrowth
    }
}

/// Right-hand side pieces of one evaluation.
struct Evaluation<T: Real> {
    eta_t: Field<T>,
    u_t: Field<T>,
    cg_iterations: usize,
}

fn evaluate<T: Real>(state: &WaveState<T>, spec: &RgnSpec<T>) -> Result<Evaluation<T>> {
    let (eps, mu, om) = (spec.eps(), spec.mu(), spec.omega());
    let h = spec.depth(&state.eta);
    require_positive(&h)?;
    let u = &state.u;
    let ux = u.deriv(1)?;
    let eta_x = state.eta.deriv(1)?;
    let eta_t = h.product(u).deriv(1)?.scale(-T::one());
    let h2 = h.product(&h);
    let mut forcing = h.product(&eta_x).axpy(
        -T::lit(2.0) * om,
        &h2.product(&ux).axpy(eps, &h.product(u).product(&eta_x)),
    );
    if eps * mu != T::zero() {
        let h3 = h2.product(&h);
        let q = h3.product(&ux.product(&ux)).deriv(1)?;
        forcing = forcing.axpy(eps * mu * T::lit(2.0 / 3.0), &q);
    }
    let solve = invert_t(&h, mu, &forcing, spec.elliptic_tol, spec.elliptic_maxit)?;
    let u_t = solve
        .solution
        .scale(-T::one())
        .axpy(-eps, &u.product(&ux));
    Ok(Evaluation {
        eta_t,
        u_t,
        cg_iterations: solve.iterations,
    })
}

/// `(eta_t, u_t)` of the Green-Naghdi system.
///
/// Fails with [`Error::Positivity`] if a positivity floor is breached.
pub fn rgn_rhs<T: Real>(state: &WaveState<T>, spec: &RgnSpec<T>) -> Result<(Field<T>, Field<T>)> {
    Field::check_same_grid(&[&state.eta, &state.u])?;
    let m = monitor(state, spec)?;
    if m.depth_breach || m.coriolis_breach {
        return Err(Error::Positivity(format!(
            "{} (min depth {}, min rotation factor {})",
            cause_of(&m).describe(),
            m.min_depth,
            m.min_coriolis
        )));
    }
    let e = evaluate(state, spec)?;
    Ok((e.eta_t, e.u_t))
}

/// Largest stable step `cfl dx / (sqrt(max h) + eps max|u|)`.
pub fn cfl_limit<T: Real>(state: &WaveState<T>, spec: &RgnSpec<T>) -> f64 {
    let h_max = 1.0 + spec.params.epsilon * state.eta.max().as_f64();
    let speed = h_max.max(0.0).sqrt() + spec.params.epsilon * state.u.max_abs().as_f64();
    spec.cfl * spec.grid.dx().as_f64() / speed.max(1e-300)
}

/// One RK4 step with one elliptic solve per stage; returns the new state
/// and the largest CG iteration count.
pub fn step_rk4<T: Real>(state: &WaveState<T>, dt: f64, spec: &RgnSpec<T>) -> Result<(WaveState<T>, usize)> {
    let limit = cfl_limit(state, spec);
    if dt.abs() > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let mut cg = 0;
    let mut next = rk4_step(state, T::lit(dt), |y: &WaveState<T>| {
        let e = evaluate(y, spec)?;
        cg = cg.max(e.cg_iterations);
        Ok(WaveState {
            eta: e.eta_t,
            u: e.u_t,
            t: y.t,
        })
    })?;
    next.t = state.t + dt;
    Ok((next, cg))
}

/// Integrates from `state0`, checking the monitors after every step.
///
/// A breached monitor ends the run with [`Termination::BlowUpDetected`];
/// the trajectory then holds the states recorded before the breach.
pub fn integrate<T: Real>(
    state0: &WaveState<T>,
    time: &TimeGrid,
    spec: &RgnSpec<T>,
) -> Result<RgnTrajectory<T>> {
    time.validate()?;
    Field::check_same_grid(&[&state0.eta, &state0.u])?;
    let (steps, h, every) = time.schedule();
    let mut state = WaveState {
        t: 0.0,
        ..state0.clone()
    };
    let m0 = monitor(&state, spec)?;
    let mut traj = RgnTrajectory {
        states: vec![],
        energy: vec![],
        monitors: vec![],
        termination: Termination::Completed,
        max_cg_iterations: 0,
    };
    if m0.breached() {
        traj.termination = Termination::BlowUpDetected {
            time: 0.0,
            cause: cause_of(&m0),
            at_start: true,
            monitor: m0,
        };
        return Ok(traj);
    }
    traj.energy.push(energy(&state, spec)?);
    traj.monitors.push(m0);
    traj.states.push(state.clone());
    for s in 1..=steps {
        let t_prev = state.t;
        let (mut next, cg) = step_rk4(&state, h, spec).map_err(|e| e.at_time(t_prev))?;
        next.t = s as f64 * h;
        traj.max_cg_iterations = traj.max_cg_iterations.max(cg);
        let m = monitor(&next, spec)?;
        if m.breached() {
            traj.termination = Termination::BlowUpDetected {
                time: next.t,
                cause: cause_of(&m),
                at_start: false,
                monitor: m,
            };
            return Ok(traj);
        }
        state = next;
        if s % every == 0 || s == steps {
            traj.energy.push(energy(&state, spec)?);
            traj.monitors.push(m);
            traj.states.push(state.clone());
        }
    }
    Ok(traj)
}

/// Plane-wave frequency `omega(k)` of the linearized system (right-going
/// branch).
pub fn linear_frequency(k: f64, omega: f64, mu: f64) -> f64 {
    let d = 1.0 + mu * k * k / 3.0;
    k * (-omega + (omega * omega + d).sqrt()) / d
}
