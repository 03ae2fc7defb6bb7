//! Scalar unidirectional models. The rotating Camassa-Holm equation is one
//! member of the generalized BBM families implemented here.
//!
//! Every member shares one right-hand side written in the generalized-BBM
//! convention
//!
//! ```text
//! (1 + mu beta d_xx) w_t = -d_x [ c w + nonlinear eps w^2/2
//!   + omega1 eps^2 w^3/3 + omega2 eps^3 w^4/4 + mu alpha w_xx
//!   - eps mu (gamma w w_xx + (delta - gamma)/2 w_x^2) ]
//! ```
//!
//! This is the model written with every term as an exact x-derivative, so
//! the discrete mass is conserved to round-off.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::FieldAlgebra;
use crate::coefficients::{CoefficientSet, Family, PhysicalParams};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::Real;
use crate::time::{rk4_step, TimeGrid};

/// Which scalar model a [`ScalarModel`] integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarVariant {
    VelocityGbbm,
    RchCanonical,
    SurfaceGbbm,
}

impl ScalarVariant {
    fn of(family: Family) -> Self {
        match family {
            Family::VelocityGbbm => ScalarVariant::VelocityGbbm,
            Family::RotationCh => ScalarVariant::RchCanonical,
            Family::Surface | Family::SurfaceRch => ScalarVariant::SurfaceGbbm,
        }
    }
}

/// Smallest admissible value of the evolution-operator symbol.
pub const SYMBOL_FLOOR: f64 = 0.1;

/// Amplitude beyond which a scalar run is declared blown up.
pub const BLOW_UP_AMPLITUDE: f64 = 1e6;

/// A validated scalar model on a grid.
#[derive(Clone, Debug)]
pub struct ScalarModel<T: Real> {
    pub coeffs: CoefficientSet<T>,
    pub params: PhysicalParams,
    pub variant: ScalarVariant,
    pub grid: Arc<Grid<T>>,
    /// CFL constant for [`ScalarModel::step_rk4`].
    pub cfl: f64,
}

/// Conserved-quantity diagnostics of a scalar run.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarDiagnostics {
    pub mass: f64,
    pub h1_invariant: f64,
    pub max_abs: f64,
}

/// Output of [`ScalarModel::integrate`].
#[derive(Clone, Debug)]
pub struct ScalarTrajectory<T: Real> {
    pub times: Vec<f64>,
    pub states: Vec<Field<T>>,
}

impl<T: Real> ScalarModel<T> {
    /// Validates the coefficient set against the grid.
    ///
    /// Fails with [`Error::NonEvolvable`] for sets flagged non-evolvable and
    /// with [`Error::Positivity`] when `1 - beta mu k^2` drops below
    /// [`SYMBOL_FLOOR`] on a resolved mode.
    pub fn new(coeffs: CoefficientSet<T>, params: PhysicalParams, grid: Arc<Grid<T>>) -> Result<Self> {
        params.validate()?;
        if !coeffs.evolvable {
            return Err(Error::NonEvolvable);
        }
        let b = coeffs.beta * T::lit(params.mu);
        let min_symbol = grid
            .second_derivative_symbol()
            .iter()
            .fold(T::infinity(), |m, &d2| m.min(T::one() + b * d2));
        if !(min_symbol.as_f64() > SYMBOL_FLOOR) {
            return Err(Error::Positivity(format!(
                "evolution symbol reaches {min_symbol} (floor {SYMBOL_FLOOR})"
            )));
        }
        Ok(Self {
            variant: ScalarVariant::of(coeffs.family),
            coeffs,
            params,
            grid,
            cfl: 0.5,
        })
    }

    fn eps(&self) -> T {
        T::lit(self.params.epsilon)
    }

    fn mu(&self) -> T {
        T::lit(self.params.mu)
    }

    /// The flux whose x-derivative is the non-time-derivative part.
    fn flux<A: FieldAlgebra<T>>(&self, w: &A) -> Result<A> {
        let k = &self.coeffs;
        let (eps, mu) = (self.eps(), self.mu());
        let half = T::lit(0.5);
        let w2 = w.product(w);
        let w3 = w2.product(w);
        let w4 = w2.product(&w2);
        let wxx = w.deriv(2)?;
        let wx = w.deriv(1)?;
        let mut f = w
            .scale(k.c)
            .axpy(half * eps * k.nonlinear, &w2)
            .axpy(eps * eps * k.omega1 / T::lit(3.0), &w3)
            .axpy(eps * eps * eps * k.omega2 / T::lit(4.0), &w4)
            .axpy(mu * k.alpha, &wxx);
        let em = eps * mu;
        if em != T::zero() {
            f = f
                .axpy(-em * k.gamma, &w.product(&wxx))
                .axpy(-em * (k.delta - k.gamma) * half, &wx.product(&wx));
        }
        Ok(f)
    }

    /// Time derivative `w_t` of the model at `w`.
    ///
    /// Works on any [`FieldAlgebra`]; on a [`crate::algebra::TimeJet`]
    /// holding `(w, w_t, ...)` it returns `(w_t, w_tt, ...)`.
    pub fn rhs<A: FieldAlgebra<T>>(&self, w: &A) -> Result<A> {
        let b = -self.coeffs.beta * self.mu();
        self.flux(w)?.deriv(1)?.scale(-T::one()).helmholtz_solve(T::one(), b)
    }

    /// Largest stable step for the current amplitude.
    pub fn cfl_limit(&self, w: &Field<T>) -> f64 {
        let speed = self.coeffs.c.as_f64().abs()
            + self.coeffs.nonlinear.as_f64().abs() * self.params.epsilon * w.max_abs().as_f64();
        self.cfl * self.grid.dx().as_f64() / speed.max(1e-300)
    }

    /// One RK4 step; negative `dt` steps backwards.
    pub fn step_rk4(&self, w: &Field<T>, dt: f64) -> Result<Field<T>> {
        let limit = self.cfl_limit(w);
        if dt.abs() > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        let next = rk4_step(w, T::lit(dt), |y| self.rhs(y))?;
        let max_abs = next.max_abs().as_f64();
        if !next.is_finite() || max_abs > BLOW_UP_AMPLITUDE {
            return Err(Error::BlowUp {
                time: f64::NAN,
                max_abs,
            });
        }
        Ok(next)
    }

    /// Integrates from `w0` and records the states at the output times of
    /// `time`.
    pub fn integrate(&self, w0: &Field<T>, time: &TimeGrid) -> Result<ScalarTrajectory<T>> {
        time.validate()?;
        let (steps, h, every) = time.schedule();
        let mut w = w0.clone();
        let mut out = ScalarTrajectory {
            times: vec![0.0],
            states: vec![w.clone()],
        };
        for s in 1..=steps {
            let t_prev = (s - 1) as f64 * h;
            w = self.step_rk4(&w, h).map_err(|e| match e {
                Error::BlowUp { max_abs, .. } => Error::BlowUp {
                    time: t_prev + h,
                    max_abs,
                },
                other => other.at_time(t_prev),
            })?;
            if s % every == 0 || s == steps {
                out.times.push(s as f64 * h);
                out.states.push(w.clone());
            }
        }
        Ok(out)
    }

    /// Mass `int w`, the quadratic functional `int (w^2 - beta mu w_x^2)`
    /// and the amplitude.
    pub fn diagnostics(&self, w: &Field<T>) -> Result<ScalarDiagnostics> {
        let wx = w.deriv(1)?;
        let h1 = w.inner(w) - self.coeffs.beta * self.mu() * wx.inner(&wx);
        Ok(ScalarDiagnostics {
            mass: w.integrate_dx().as_f64(),
            h1_invariant: h1.as_f64(),
            max_abs: w.max_abs().as_f64(),
        })
    }

    /// Linear phase speed `(c - alpha mu k^2) / (1 - beta mu k^2)` of mode `k`.
    pub fn linear_phase_speed(&self, k: f64) -> f64 {
        let mu = self.params.mu;
        let c = &self.coeffs;
        (c.c.as_f64() - c.alpha.as_f64() * mu * k * k) / (1.0 - c.beta.as_f64() * mu * k * k)
    }
}
