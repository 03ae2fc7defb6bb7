//! Classical Runge-Kutta stepping and output scheduling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::scalar::Real;

/// States that can be combined linearly by the integrator.
pub trait OdeState<T: Real>: Clone {
    /// `self + a * other`.
    fn axpy(&self, a: T, other: &Self) -> Self;
}

impl<T: Real> OdeState<T> for Field<T> {
    fn axpy(&self, a: T, other: &Self) -> Self {
        Field::axpy(self, a, other)
    }
}

/// One classical four-stage Runge-Kutta step of size `dt` (negative steps
/// integrate backwards).
pub fn rk4_step<T: Real, S: OdeState<T>>(
    y: &S,
    dt: T,
    mut f: impl FnMut(&S) -> Result<S>,
) -> Result<S> {
    let half = T::lit(0.5) * dt;
    let k1 = f(y)?;
    let k2 = f(&y.axpy(half, &k1))?;
    let k3 = f(&y.axpy(half, &k2))?;
    let k4 = f(&y.axpy(dt, &k3))?;
    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);
    Ok(y
        .axpy(sixth, &k1)
        .axpy(third, &k2)
        .axpy(third, &k3)
        .axpy(sixth, &k4))
}

/// Time block of a run. It holds the final time and the requested step
/// along with the output cadence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    pub dt_out: f64,
}

impl TimeGrid {
    /// Checks that the times are finite and the steps positive.
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Domain(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.dt_out > 0.0 && self.dt_out.is_finite()) {
            return Err(Error::Domain(format!("dt_out = {} must be > 0", self.dt_out)));
        }
        Ok(())
    }

    /// Step schedule of the run. The uniform step lands exactly on `t_end`
    /// and never exceeds `dt`. Returns the step count and the step, then
    /// the number of steps between outputs.
    pub fn schedule(&self) -> (usize, f64, usize) {
        if self.t_end == 0.0 {
            return (0, self.dt, 1);
        }
        let steps = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        let h = self.t_end / steps as f64;
        let every = ((self.dt_out / h).round() as usize).max(1);
        (steps, h, every)
    }

    /// Output times produced by [`TimeGrid::schedule`]: every `every` steps
    /// and always the final time.
    pub fn output_times(&self) -> Vec<f64> {
        let (steps, h, every) = self.schedule();
        let mut out: Vec<f64> = (0..=steps)
            .filter(|s| s % every == 0 || *s == steps)
            .map(|s| s as f64 * h)
            .collect();
        if steps == 0 {
            out = vec![0.0];
        }
        out
    }
}
