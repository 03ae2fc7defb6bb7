//! Least-squares fits used by the scaling studies.

use serde::Serialize;

use crate::error::{Error, Result};

/// Straight-line fit `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares over `(x, y)` pairs.
///
/// Fails with [`Error::InsufficientData`] unless at least two distinct `x`
/// values are present.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len() as f64;
    let distinct = {
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        xs.len()
    };
    if distinct < 2 {
        return Err(Error::InsufficientData(format!(
            "a line fit needs two distinct abscissae, got {distinct}"
        )));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
    })
}

/// Fit of `ln y` against `ln x`; non-positive samples are rejected.
pub fn log_log_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Domain(format!(
            "log-log fit needs positive data, got ({}, {})",
            p.0, p.1
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|p| (p.0.ln(), p.1.ln())).collect();
    linear_fit(&logs)
}

/// Line through the origin `y = a x` that minimizes the largest ratio
/// between samples and line, together with that ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OriginFit {
    /// Minimax slope `sqrt(max(y/x) min(y/x))`.
    pub slope: f64,
    /// `max(y / (a x), (a x) / y)` over the samples.
    pub max_factor: f64,
    /// Ordinary least-squares slope, for reference.
    pub ls_slope: f64,
}

/// Fits `y = a x` to samples with `x > 0`.
pub fn origin_fit(points: &[(f64, f64)]) -> Result<OriginFit> {
    let pts: Vec<&(f64, f64)> = points.iter().filter(|p| p.0 > 0.0).collect();
    if pts.is_empty() {
        return Err(Error::InsufficientData("no samples with positive abscissa".into()));
    }
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let ratios = pts.iter().map(|p| p.1 / p.0);
    let hi = ratios.clone().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.fold(f64::INFINITY, f64::min);
    let (slope, max_factor) = if lo > 0.0 {
        ((hi * lo).sqrt(), (hi / lo).sqrt())
    } else {
        (sxy / sxx, f64::INFINITY)
    };
    Ok(OriginFit {
        slope,
        max_factor,
        ls_slope: sxy / sxx,
    })
}
