//! Initial-data descriptors.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::Real;

/// A `sech^2` pulse `amplitude sech^2((x - center) / width)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub amplitude: f64,
    pub width: f64,
    /// Pulse center; `None` places it mid-domain.
    pub center: Option<f64>,
}

impl Default for Pulse {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            width: 2.0,
            center: None,
        }
    }
}

impl Pulse {
    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::Domain("pulse amplitude must be finite".into()));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Domain(format!("pulse width {} must be positive", self.width)));
        }
        Ok(())
    }

    /// Samples the pulse, wrapped so that it is centered in the periodic
    /// cell around its center.
    pub fn sample<T: Real>(&self, grid: &Arc<Grid<T>>) -> Field<T> {
        let l = grid.length().as_f64();
        let x0 = self.center.unwrap_or(l / 2.0);
        let (a, w) = (self.amplitude, self.width);
        Field::from_fn(grid, |x| {
            let d = (x.as_f64() - x0 + l / 2.0).rem_euclid(l) - l / 2.0;
            T::lit(a / (d / w).cosh().powi(2))
        })
    }

    /// Largest value of the pulse on the boundary of its periodic cell.
    pub fn seam_value(&self, length: f64) -> f64 {
        self.amplitude.abs() / (length / (2.0 * self.width)).cosh().powi(2)
    }
}
