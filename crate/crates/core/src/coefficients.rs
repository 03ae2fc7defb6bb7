//! Closed-form coefficient families of the rotating shallow-water models.
//!
//! Every constructor works for any [`CoefScalar`], so the same code path is
//! evaluated in floating point by the solvers and in exact rational
//! arithmetic by the identity tests. Model coefficients are stored in the
//! generalized-BBM sign convention, where the time-dispersive term reads
//! `+mu*beta*w_xxt`; [`RchConvention`] converts to the canonical rotating
//! Camassa-Holm convention.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{CoefScalar, Real};

/// Which construction produced a [`CoefficientSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Generalized BBM equation for the velocity, two-parameter family in
    /// `(p, lambda)`; `lambda = 0` is the averaged-velocity family.
    VelocityGbbm,
    /// The rotating Camassa-Holm point of the velocity family.
    RotationCh,
    /// Generalized BBM equation for the surface elevation, one parameter `p`.
    Surface,
    /// The Camassa-Holm-type point of the surface family.
    SurfaceRch,
}

/// Selects between the self-consistent surface constants and the
/// uncorrected closed forms, kept for comparison.
///
/// The two differ only for the surface families. The affected constants
/// are the higher-order coefficients of the scalar model and of the map
/// `u = G(eta)`, which also moves the Camassa-Holm point `p`. Only
/// [`Transcription::Consistent`] yields an O(mu^2) residual against the
/// rotating Green-Naghdi system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transcription {
    #[default]
    Consistent,
    Uncorrected,
}

/// Regime triple and family parameters governing every model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Nonlinearity ratio, amplitude over depth.
    pub epsilon: f64,
    /// Shallowness, squared depth over squared wavelength.
    pub mu: f64,
    /// Coriolis frequency.
    pub omega: f64,
    /// Free family parameter.
    pub p: f64,
    /// Depth parameter `(theta^2 - 1/3)/2`.
    pub lambda: f64,
    /// Amplitude bound `M` of the Camassa-Holm regime.
    pub regime_m: f64,
    /// Shallowness bound `mu_0` of the Camassa-Holm regime.
    pub regime_mu0: f64,
    /// Whether [`PhysicalParams::validate`] enforces the regime bounds.
    pub enforce_regime: bool,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            mu: 0.01,
            omega: 0.0,
            p: 0.0,
            lambda: 0.0,
            regime_m: 1.0,
            regime_mu0: 0.1,
            enforce_regime: false,
        }
    }
}

impl PhysicalParams {
    /// Checks ranges; with regime enforcement also `0 < mu <= mu0` and
    /// `0 < epsilon <= M sqrt(mu)`.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.epsilon,
            self.mu,
            self.omega,
            self.p,
            self.lambda,
            self.regime_m,
            self.regime_mu0,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("parameters must be finite".into()));
        }
        if self.epsilon < 0.0 || self.mu < 0.0 {
            return Err(Error::Domain("epsilon and mu must be non-negative".into()));
        }
        if self.omega < 0.0 {
            return Err(Error::Domain(format!("omega = {} is negative", self.omega)));
        }
        check_lambda(self.lambda)?;
        if self.enforce_regime {
            if !(self.mu > 0.0 && self.mu <= self.regime_mu0) {
                return Err(Error::Domain(format!(
                    "mu = {} outside (0, {}]",
                    self.mu, self.regime_mu0
                )));
            }
            let bound = self.regime_m * self.mu.sqrt();
            if !(self.epsilon > 0.0 && self.epsilon <= bound * (1.0 + 1e-12)) {
                return Err(Error::Domain(format!(
                    "epsilon = {} outside (0, M sqrt(mu)] = (0, {bound}]",
                    self.epsilon
                )));
            }
        }
        Ok(())
    }
}

/// Depth parameter associated with the level line `theta`.
pub fn lambda_from_theta(theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [0, 1]")));
    }
    Ok(0.5 * (theta * theta - 1.0 / 3.0))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(-1.0 / 6.0 - 1e-15..=1.0 / 3.0 + 1e-15).contains(&lambda) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} outside [-1/6, 1/3]"
        )));
    }
    Ok(())
}

/// Linear long-wave speed `c = sqrt(1 + omega^2) - omega`.
///
/// Evaluated as `1 / (sqrt(1 + omega^2) + omega)` to avoid cancellation.
pub fn wave_speed<T: Real>(omega: T) -> Result<T> {
    if !(omega >= T::zero()) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega = {omega} must be finite and >= 0")));
    }
    Ok(T::one() / ((T::one() + omega * omega).sqrt() + omega))
}

/// Coriolis frequency belonging to the speed `c`, i.e. `(1 - c^2) / (2c)`.
pub fn omega_from_speed<T: CoefScalar>(c: T) -> T {
    (T::one() - c * c) / (T::int(2) * c)
}

/// Constants of the velocity reconstruction `eta = F(u)`.
///
/// They are evaluated on the averaged-velocity equation, i.e. the
/// `lambda = 0` family at parameter `p + lambda`; for `lambda = 0` they
/// coincide with the set's own equation coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VelocityConstants<T> {
    /// The constant `(c^2 - 2) / (2 c^2 (c^2 + 1))`.
    pub h_star: T,
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub a5: T,
    /// Coefficient of `mu*u_xt` in `F`, equal to `1/(3(c^2+1))`.
    pub mu_coefficient: T,
    /// Coefficient of `eps^3*u^4` in `F`, `2*omega*A3 + omega2/4`.
    pub quartic_coefficient: T,
    /// `delta` of the averaged-velocity equation.
    pub delta_avg: T,
}

/// Coefficients of `u = G(eta)` for the surface family:
/// `u = c eta + eps*eta2 eta^2 + mu*eta_xt eta_xt + eps^2*eta3 eta^3
///  + eps^3*eta4 eta^4 + eps*mu*(eta_etaxx eta eta_xx + etax2 eta_x^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceMapCoefficients<T> {
    pub eta2: T,
    pub eta_xt: T,
    pub eta3: T,
    pub eta4: T,
    pub eta_etaxx: T,
    pub etax2: T,
}

/// Auxiliary constants of the surface family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfaceConstants<T> {
    pub b: T,
    pub omega1_bar: T,
    pub omega2_bar: T,
    /// `A1_bar` through `A6_bar`.
    pub a_bar: [T; 6],
    pub map: SurfaceMapCoefficients<T>,
}

/// Coefficients in the canonical rotating Camassa-Holm convention
///
/// ```text
/// w_t - beta_rch mu w_xxt + c w_x + 3 alpha_rch eps w w_x - beta0 mu w_xxx
///   + omega1 eps^2 w^2 w_x + omega2 eps^3 w^3 w_x
///   = eps mu (gamma w w_xxx + delta w_x w_xx)
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RchConvention<T> {
    pub c: T,
    pub alpha_rch: T,
    pub beta0: T,
    pub beta_rch: T,
    pub gamma: T,
    pub delta: T,
    pub omega1: T,
    pub omega2: T,
}

/// Equation coefficients in the generalized-BBM convention
///
/// ```text
/// w_t + c w_x + nonlinear eps w w_x + omega1 eps^2 w^2 w_x
///   + omega2 eps^3 w^3 w_x + mu (alpha w_xxx + beta w_xxt)
///   = eps mu (gamma w w_xxx + delta w_x w_xx)
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GbbmConvention<T> {
    pub c: T,
    pub nonlinear: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
    pub omega1: T,
    pub omega2: T,
}

impl<T: CoefScalar> GbbmConvention<T> {
    /// Converts to the canonical rotating Camassa-Holm convention.
    pub fn to_rch(&self) -> RchConvention<T> {
        RchConvention {
            c: self.c,
            alpha_rch: self.nonlinear / T::int(3),
            beta0: -self.alpha,
            beta_rch: -self.beta,
            gamma: self.gamma,
            delta: self.delta,
            omega1: self.omega1,
            omega2: self.omega2,
        }
    }
}

impl<T: CoefScalar> RchConvention<T> {
    /// Converts back to the generalized-BBM convention.
    pub fn to_gbbm(&self) -> GbbmConvention<T> {
        GbbmConvention {
            c: self.c,
            nonlinear: self.alpha_rch * T::int(3),
            alpha: -self.beta0,
            beta: -self.beta_rch,
            gamma: self.gamma,
            delta: self.delta,
            omega1: self.omega1,
            omega2: self.omega2,
        }
    }
}

/// Every derived constant of one model, tagged with the family that
/// produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoefficientSet<T> {
    pub family: Family,
    pub transcription: Transcription,
    pub omega: T,
    pub c: T,
    pub p: T,
    pub lambda: T,
    /// Coefficient of `eps*w*w_x` (`3c^2/(c^2+1)` or `B`).
    pub nonlinear: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
    /// Cubic coefficient (`omega1`, or `omega1_bar` for surface sets).
    pub omega1: T,
    /// Quartic coefficient (`omega2`, or `omega2_bar` for surface sets).
    pub omega2: T,
    pub velocity: Option<VelocityConstants<T>>,
    pub surface: Option<SurfaceConstants<T>>,
    pub rch: Option<RchConvention<T>>,
    /// Whether the evolution operator `1 - beta mu k^2` is positive.
    pub evolvable: bool,
}

impl<T: CoefScalar> CoefficientSet<T> {
    /// Equation coefficients in the generalized-BBM convention.
    pub fn gbbm(&self) -> GbbmConvention<T> {
        GbbmConvention {
            c: self.c,
            nonlinear: self.nonlinear,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            omega1: self.omega1,
            omega2: self.omega2,
        }
    }

    /// Whether the set describes a velocity (as opposed to surface) model.
    pub fn is_velocity(&self) -> bool {
        matches!(self.family, Family::VelocityGbbm | Family::RotationCh)
    }

    /// Converts every scalar to `f64`.
    pub fn to_f64(&self) -> CoefficientSet<f64> {
        self.map(|v| v.approx_f64())
    }

    /// Applies `f` to every scalar field.
    pub fn map<U, F: Fn(T) -> U>(&self, f: F) -> CoefficientSet<U> {
        CoefficientSet {
            family: self.family,
            transcription: self.transcription,
            omega: f(self.omega),
            c: f(self.c),
            p: f(self.p),
            lambda: f(self.lambda),
            nonlinear: f(self.nonlinear),
            alpha: f(self.alpha),
            beta: f(self.beta),
            gamma: f(self.gamma),
            delta: f(self.delta),
            omega1: f(self.omega1),
            omega2: f(self.omega2),
            velocity: self.velocity.map(|v| VelocityConstants {
                h_star: f(v.h_star),
                a1: f(v.a1),
                a2: f(v.a2),
                a3: f(v.a3),
                a4: f(v.a4),
                a5: f(v.a5),
                mu_coefficient: f(v.mu_coefficient),
                quartic_coefficient: f(v.quartic_coefficient),
                delta_avg: f(v.delta_avg),
            }),
            surface: self.surface.map(|s| SurfaceConstants {
                b: f(s.b),
                omega1_bar: f(s.omega1_bar),
                omega2_bar: f(s.omega2_bar),
                a_bar: s.a_bar.map(&f),
                map: SurfaceMapCoefficients {
                    eta2: f(s.map.eta2),
                    eta_xt: f(s.map.eta_xt),
                    eta3: f(s.map.eta3),
                    eta4: f(s.map.eta4),
                    eta_etaxx: f(s.map.eta_etaxx),
                    etax2: f(s.map.etax2),
                },
            }),
            rch: self.rch.map(|r| RchConvention {
                c: f(r.c),
                alpha_rch: f(r.alpha_rch),
                beta0: f(r.beta0),
                beta_rch: f(r.beta_rch),
                gamma: f(r.gamma),
                delta: f(r.delta),
                omega1: f(r.omega1),
                omega2: f(r.omega2),
            }),
            evolvable: self.evolvable,
        }
    }
}

fn int<T: CoefScalar>(v: i64) -> T {
    T::int(v)
}

/// Closed-form building blocks shared by the velocity families.
struct VelocityClosedForms<T> {
    q: T,
    a: T,
    gamma0: T,
    delta0: T,
    omega1: T,
    omega2: T,
    h_star: T,
}

fn velocity_closed_forms<T: CoefScalar>(c: T) -> VelocityClosedForms<T> {
    let c2 = c * c;
    let q = c2 + T::one();
    let q3 = q.powi_exact(3);
    let q5 = q.powi_exact(5);
    VelocityClosedForms {
        q,
        a: int::<T>(3) * c2 / q,
        gamma0: -c2 * (int::<T>(5) * c2 - T::one()) / (int::<T>(3) * q3),
        delta0: -c2 * (int::<T>(3) * c2 * c2 + int::<T>(16) * c2 + int::<T>(4)) / (int::<T>(3) * q3),
        omega1: -int::<T>(3) * c * (c2 - T::one()) * (c2 - int(2)) / (int::<T>(2) * q3),
        omega2: (c2 - int(2)) * (c2 - T::one()) * (c2 - T::one()) * (int::<T>(8) * c2 - T::one())
            / (int::<T>(2) * q5),
        h_star: (c2 - int(2)) / (int::<T>(2) * c2 * q),
    }
}

/// Velocity family at speed `c` (the Coriolis frequency is implied).
pub fn velocity_family_at_speed<T: CoefScalar>(c: T, p: T, lambda: T) -> CoefficientSet<T> {
    velocity_family_inner(omega_from_speed(c), c, p, lambda)
}

/// The two-parameter generalized-BBM velocity family.
///
/// `alpha = c (p + lambda)`, `beta = -c^2/(3(c^2+1)) + p + lambda`,
/// `gamma = gamma0 - a (p + lambda)`, `delta = delta0 - a (3p + lambda)`
/// with `a = 3c^2/(c^2+1)`. The map constants are those of the
/// averaged-velocity equation at parameter `p + lambda`.
pub fn gbbm_velocity_family<T: Real + CoefScalar>(
    omega: T,
    p: T,
    lambda: T,
) -> Result<CoefficientSet<T>> {
    check_lambda(lambda.as_f64())?;
    let c = wave_speed(omega)?;
    Ok(velocity_family_inner(omega, c, p, lambda))
}

fn velocity_family_inner<T: CoefScalar>(omega: T, c: T, p: T, lambda: T) -> CoefficientSet<T> {
    let k = velocity_closed_forms(c);
    let pl = p + lambda;
    let third = T::frac(1, 3);
    let alpha = c * pl;
    let beta = -c * c / (int::<T>(3) * k.q) + pl;
    let gamma = k.gamma0 - k.a * pl;
    let delta = k.delta0 - k.a * (int::<T>(3) * p + lambda);

    // Averaged-velocity equation: same alpha, beta, gamma; delta shifted.
    let delta_avg = k.delta0 - int::<T>(3) * k.a * pl;
    let mu_coefficient = third + beta - alpha / c;
    let coupling = int::<T>(3) * alpha * c / k.q;
    let two_omega = int::<T>(2) * omega;
    let a1 = (third + gamma + coupling) + two_omega * c * mu_coefficient;
    let a2 = (T::one() + delta_avg - gamma) / int(2) + coupling;
    let a3 = k.omega1 / int(3) - two_omega * k.h_star;
    let shear = third + gamma + alpha / c;
    let a4 = c * (a1 + shear * coupling - int::<T>(2) * k.h_star * (beta - alpha / c));
    let a5 = c * (a2 + shear * coupling + k.h_star * (beta - alpha / c));

    CoefficientSet {
        family: Family::VelocityGbbm,
        transcription: Transcription::Consistent,
        omega,
        c,
        p,
        lambda,
        nonlinear: k.a,
        alpha,
        beta,
        gamma,
        delta,
        omega1: k.omega1,
        omega2: k.omega2,
        velocity: Some(VelocityConstants {
            h_star: k.h_star,
            a1,
            a2,
            a3,
            a4,
            a5,
            mu_coefficient,
            quartic_coefficient: two_omega * a3 + k.omega2 / int(4),
            delta_avg,
        }),
        surface: None,
        rch: None,
        evolvable: beta < T::zero(),
    }
}

/// The rotating Camassa-Holm point of the velocity family at speed `c`.
pub fn rch_parameters_at_speed<T: CoefScalar>(c: T) -> CoefficientSet<T> {
    rch_inner(omega_from_speed(c), c)
}

/// The rotating Camassa-Holm equation: the velocity family at
/// `lambda = (c^4 - 2c^2 + 5)/(12(c^2+1)^2)`,
/// `p = -(3c^4 + 10c^2 + 3)/(12(c^2+1)^2)`, where `delta = 2 gamma`.
///
/// The set is flagged non-evolvable (not rejected) when `beta_rch <= 0`.
pub fn rch_parameters<T: Real + CoefScalar>(omega: T) -> Result<CoefficientSet<T>> {
    let c = wave_speed(omega)?;
    Ok(rch_inner(omega, c))
}

fn rch_inner<T: CoefScalar>(omega: T, c: T) -> CoefficientSet<T> {
    let c2 = c * c;
    let c4 = c2 * c2;
    let q = c2 + T::one();
    let q2 = q * q;
    let lambda = (c4 - int::<T>(2) * c2 + int(5)) / (int::<T>(12) * q2);
    let p = -(int::<T>(3) * c4 + int::<T>(10) * c2 + int(3)) / (int::<T>(12) * q2);
    let mut set = velocity_family_inner(omega, c, p, lambda);
    let beta_rch = (int::<T>(3) * c4 + int::<T>(8) * c2 - T::one()) / (int::<T>(6) * q2);
    set.family = Family::RotationCh;
    set.rch = Some(RchConvention {
        c,
        alpha_rch: c2 / q,
        beta0: c * (c4 + int::<T>(6) * c2 - T::one()) / (int::<T>(6) * q2),
        beta_rch,
        gamma: set.gamma,
        delta: set.delta,
        omega1: set.omega1,
        omega2: set.omega2,
    });
    set.evolvable = beta_rch > T::zero();
    set
}

/// Surface family at speed `c`.
pub fn surface_family_at_speed<T: CoefScalar>(
    c: T,
    p: T,
    transcription: Transcription,
) -> CoefficientSet<T> {
    surface_inner(omega_from_speed(c), c, p, transcription)
}

/// The one-parameter generalized-BBM family for the surface elevation.
pub fn surface_family<T: Real + CoefScalar>(
    omega: T,
    p: T,
    transcription: Transcription,
) -> Result<CoefficientSet<T>> {
    let c = wave_speed(omega)?;
    Ok(surface_inner(omega, c, p, transcription))
}

fn surface_inner<T: CoefScalar>(
    omega: T,
    c: T,
    p: T,
    transcription: Transcription,
) -> CoefficientSet<T> {
    let c2 = c * c;
    let c3 = c2 * c;
    let c4 = c2 * c2;
    let q = c2 + T::one();
    let q3 = q.powi_exact(3);
    let q5 = q.powi_exact(5);
    let two = int::<T>(2);
    let three = int::<T>(3);

    let b = three * c3 / q;
    let omega1_bar = -three * c3 * (two - c2) / q3;
    let alpha = c * p;
    let beta = -c2 / (three * q) + p;
    let (omega2_bar, gamma0, delta0) = match transcription {
        Transcription::Consistent => (
            c3 * (c2 - two) * (c2 * c4 - int::<T>(7) * c4 + int::<T>(5) * c2 - int(5)) / q5,
            -c3 * (int::<T>(5) * c2 - T::one()) / (three * q3),
            -c3 * (int::<T>(7) * c2 - two) / (three * q3),
        ),
        Transcription::Uncorrected => (
            c3 * (two - c2) * (c2 * c4 + int::<T>(9) * c4 - int::<T>(7) * c2 + three) / q5,
            -c3 * (-two * c4 + int::<T>(7) * c2 + three) / (three * q3),
            -c3 * (-int::<T>(6) * c4 + int::<T>(13) * c2 + int(10)) / (three * q3),
        ),
    };
    let gamma = gamma0 - three * c3 / q * p;
    let delta = delta0 - int::<T>(9) * c3 / q * p;

    let half_b = b / two - c;
    let ba = beta - alpha / c;
    let g_shift = gamma + alpha * b / c;
    let d_shift = (delta - gamma) / two + alpha * b / c;
    let a_bar = surface_auxiliary(c, b, omega1_bar, omega2_bar, alpha, beta, gamma, delta);

    let map = match transcription {
        Transcription::Consistent => SurfaceMapCoefficients {
            eta2: half_b,
            eta_xt: ba,
            eta3: omega1_bar / three - half_b,
            eta4: omega2_bar / int(4) - omega1_bar / three + half_b,
            eta_etaxx: -(g_shift - beta * c + alpha),
            etax2: -d_shift,
        },
        Transcription::Uncorrected => SurfaceMapCoefficients {
            eta2: c * (c2 - two) / (two * q),
            eta_xt: -c2 / (three * q),
            eta3: c * (two - c2) * (c4 + T::one()) / (two * q3),
            eta4: -c * (two - c2)
                * (c4 * c4 - int::<T>(5) * c4 * c2 + int::<T>(11) * c4 + c2 + two)
                / (int::<T>(4) * q5),
            eta_etaxx: c3 * (-three * c4 + int::<T>(5) * c2 + two) / (three * q3),
            etax2: c3 * (-int::<T>(4) * c4 + int::<T>(6) * c2 + int(7)) / (int::<T>(6) * q3),
        },
    };

    CoefficientSet {
        family: Family::Surface,
        transcription,
        omega,
        c,
        p,
        lambda: T::zero(),
        nonlinear: b,
        alpha,
        beta,
        gamma,
        delta,
        omega1: omega1_bar,
        omega2: omega2_bar,
        velocity: None,
        surface: Some(SurfaceConstants {
            b,
            omega1_bar,
            omega2_bar,
            a_bar,
            map,
        }),
        rch: None,
        evolvable: beta < T::zero(),
    }
}

/// The auxiliary constants `A1_bar` through `A6_bar` of the surface family.
#[allow(clippy::too_many_arguments)]
fn surface_auxiliary<T: CoefScalar>(
    c: T,
    b: T,
    omega1_bar: T,
    omega2_bar: T,
    alpha: T,
    beta: T,
    gamma: T,
    delta: T,
) -> [T; 6] {
    let two = int::<T>(2);
    let three = int::<T>(3);
    let c2 = c * c;
    let c3 = c2 * c;
    let half_b = b / two - c;
    let ba = beta - alpha / c;
    let g_shift = gamma + alpha * b / c;
    let d_shift = (delta - gamma) / two + alpha * b / c;
    [
        -c2 * omega1_bar + (three * c2 - two * c * b) * half_b,
        -c2 * omega2_bar + (int::<T>(10) / three * c2 - two * c * b) * omega1_bar
            - (int::<T>(4) * c2 - three * c * b) * half_b,
        (two * c2 * b - three * c3) * ba + c2 * g_shift,
        (c2 * b / two + c3) * ba + c2 * d_shift,
        -c3 / three - int::<T>(4) * c2 * half_b * (ba - T::frac(1, 6)) - c2 * g_shift,
        -c3 / two + two * c2 / three * half_b - (c2 * b / two + c3) * ba - c2 * d_shift,
    ]
}

/// Parameter `p` of the Camassa-Holm point of the surface family.
pub fn surface_rch_p<T: CoefScalar>(c: T, transcription: Transcription) -> T {
    let c2 = c * c;
    let q = c2 + T::one();
    match transcription {
        Transcription::Consistent => c2 / (int::<T>(3) * q * q),
        Transcription::Uncorrected => {
            (int::<T>(2) * c2 * c2 + c2 - int(4)) / (int::<T>(9) * q * q)
        }
    }
}

/// Surface Camassa-Holm point at speed `c`.
pub fn surface_rch_parameters_at_speed<T: CoefScalar>(
    c: T,
    transcription: Transcription,
) -> CoefficientSet<T> {
    let mut set = surface_family_at_speed(c, surface_rch_p(c, transcription), transcription);
    set.family = Family::SurfaceRch;
    set
}

/// The surface family at the point where `delta = 2 gamma`.
pub fn surface_rch_parameters<T: Real + CoefScalar>(
    omega: T,
    transcription: Transcription,
) -> Result<CoefficientSet<T>> {
    let c = wave_speed(omega)?;
    let mut set = surface_inner(omega, c, surface_rch_p(c, transcription), transcription);
    set.family = Family::SurfaceRch;
    Ok(set)
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: &'static str,
    /// Coefficient names the identity involves.
    pub involves: Vec<&'static str>,
    /// `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
    pub residual: f64,
    pub holds: bool,
}

/// All identities checked for one coefficient set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub tolerance: f64,
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    /// Names of the violated identities.
    pub fn violations(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name).collect()
    }

    /// Whether every identity holds.
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// Largest residual over all identities.
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// Default tolerance for [`check_constraints`].
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

struct Checker<T> {
    tolerance: f64,
    checks: Vec<ConstraintCheck>,
    _marker: std::marker::PhantomData<T>,
}

impl<T: CoefScalar> Checker<T> {
    fn push(&mut self, name: &'static str, involves: &[&'static str], lhs: T, rhs: T) {
        let scale = T::one().max_of(lhs.abs()).max_of(rhs.abs());
        let residual = ((lhs - rhs).abs() / scale).approx_f64();
        self.checks.push(ConstraintCheck {
            name,
            involves: involves.to_vec(),
            residual,
            holds: residual < self.tolerance,
        });
    }
}

trait MaxOf {
    fn max_of(self, other: Self) -> Self;
}

impl<T: PartialOrd> MaxOf for T {
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Evaluates every identity the set's family is required to satisfy.
///
/// Violations are reported, never raised. Each check lists the coefficient
/// names it involves, so a corrupted coefficient flags exactly the
/// identities that contain it.
pub fn check_constraints<T: CoefScalar>(set: &CoefficientSet<T>, tolerance: f64) -> ConstraintReport {
    let mut ck = Checker::<T> {
        tolerance,
        checks: Vec::new(),
        _marker: std::marker::PhantomData,
    };
    let c = set.c;
    let c2 = c * c;
    let c3 = c2 * c;
    let c4 = c2 * c2;
    let q = c2 + T::one();
    let q2 = q * q;
    let q3 = q2 * q;
    let two = int::<T>(2);
    let three = int::<T>(3);
    let (alpha, beta, gamma, delta) = (set.alpha, set.beta, set.gamma, set.delta);

    ck.push("speed", &["c", "omega"], c * (c + two * set.omega), T::one());
    ck.push(
        "beta-alpha",
        &["alpha", "beta"],
        beta - alpha / c,
        -c2 / (three * q),
    );

    if set.is_velocity() {
        let k = velocity_closed_forms(c);
        let coupling = three * alpha * c / q;
        ck.push("omega1", &["omega1"], set.omega1, k.omega1);
        ck.push("omega2", &["omega2"], set.omega2, k.omega2);
        ck.push("nonlinear", &["nonlinear"], set.nonlinear, k.a);
        ck.push("gamma-alpha", &["alpha", "gamma"], gamma + coupling, k.gamma0);
        ck.push(
            "delta-gamma-alpha",
            &["alpha", "gamma", "delta", "lambda"],
            (delta - gamma) / two + coupling - k.a * set.lambda,
            -c2 * (three * c4 + int::<T>(11) * c2 + int(5)) / (int::<T>(6) * q3),
        );
        if let Some(v) = &set.velocity {
            ck.push(
                "h-star",
                &["h_star", "omega"],
                T::one() / two - two * set.omega / c - three * c2 / (two * q),
                v.h_star,
            );
            ck.push(
                "eta-map-mu-coefficient",
                &["alpha", "beta"],
                T::frac(1, 3) + beta - alpha / c,
                T::one() / (three * q),
            );
            ck.push(
                "averaged-delta",
                &["delta", "delta_avg", "lambda"],
                v.delta_avg,
                delta - two * k.a * set.lambda,
            );
        }
        if let Some(r) = &set.rch {
            ck.push("rch-beta-delta", &["beta", "delta"], -two * c2 * beta / q, delta);
            ck.push("rch-gamma-delta", &["gamma", "delta"], two * gamma, delta);
            ck.push("rch-beta-sign", &["beta", "beta_rch"], r.beta_rch, -beta);
            ck.push("rch-beta0-sign", &["alpha", "beta0"], r.beta0, -alpha);
            ck.push(
                "rch-nonlinear",
                &["alpha_rch", "nonlinear"],
                three * r.alpha_rch,
                set.nonlinear,
            );
            ck.push(
                "rch-dispersive-product",
                &["alpha_rch", "beta_rch", "gamma"],
                r.alpha_rch * r.beta_rch,
                gamma,
            );
            ck.push(
                "lambda-plus-p",
                &["lambda", "p"],
                set.lambda + set.p,
                -(c4 + int::<T>(6) * c2 - T::one()) / (int::<T>(6) * q2),
            );
            ck.push(
                "lambda-minus-p",
                &["lambda", "p"],
                set.lambda - set.p,
                (c4 + two * c2 + two) / (three * q2),
            );
        }
    }

    if let Some(s) = &set.surface {
        let half_b = s.b / two - c;
        let ba = beta - alpha / c;
        let g_shift = gamma + alpha * s.b / c;
        let d_shift = (delta - gamma) / two + alpha * s.b / c;
        let a_bar =
            surface_auxiliary(c, s.b, s.omega1_bar, s.omega2_bar, alpha, beta, gamma, delta);
        ck.push("b-closed-form", &["b"], s.b, three * c3 / q);
        ck.push("b-relation", &["b"], s.b, c3 - two * c2 * half_b);
        ck.push(
            "omega1-bar-closed-form",
            &["omega1"],
            s.omega1_bar,
            -three * c3 * (two - c2) / q3,
        );
        ck.push(
            "omega1-bar-relation",
            &["omega1", "b"],
            s.omega1_bar,
            three * c2 * half_b + a_bar[0],
        );
        ck.push(
            "beta-alpha-implicit",
            &["alpha", "beta"],
            ba,
            -c2 * (ba + T::frac(1, 3)),
        );
        ck.push("map-eta2", &["b", "g_eta2"], s.map.eta2, half_b);
        ck.push("map-eta-xt", &["alpha", "beta", "g_eta_xt"], s.map.eta_xt, ba);
        ck.push(
            "map-eta3",
            &["b", "omega1", "g_eta3"],
            s.map.eta3,
            s.omega1_bar / three - half_b,
        );
        ck.push(
            "map-eta-etaxx",
            &["alpha", "beta", "gamma", "b", "g_eta_etaxx"],
            s.map.eta_etaxx,
            -(g_shift - beta * c + alpha),
        );
        ck.push(
            "map-etax2",
            &["alpha", "gamma", "delta", "b", "g_etax2"],
            s.map.etax2,
            -d_shift,
        );
        match set.transcription {
            Transcription::Consistent => {
                ck.push(
                    "omega2-bar-relation",
                    &["omega2", "omega1", "b"],
                    s.omega2_bar,
                    int::<T>(4) * c2 * (s.omega1_bar / three - half_b)
                        + two * c * half_b * half_b
                        + a_bar[1],
                );
                ck.push(
                    "gamma-closed-form",
                    &["alpha", "gamma", "b"],
                    g_shift,
                    -c3 * (int::<T>(5) * c2 - T::one()) / (three * q3),
                );
                ck.push(
                    "delta-closed-form",
                    &["alpha", "gamma", "delta", "b"],
                    d_shift,
                    -c3 * (two * c2 - T::one()) / (int::<T>(6) * q3),
                );
                ck.push(
                    "map-eta4",
                    &["b", "omega1", "omega2", "g_eta4"],
                    s.map.eta4,
                    s.omega2_bar / int(4) - s.omega1_bar / three + half_b,
                );
            }
            Transcription::Uncorrected => {
                ck.push(
                    "gamma-closed-form",
                    &["alpha", "gamma", "b"],
                    g_shift,
                    -c3 * (-two * c4 + int::<T>(7) * c2 + three) / (three * q3),
                );
                ck.push(
                    "delta-closed-form",
                    &["alpha", "gamma", "delta", "b"],
                    d_shift,
                    -c3 * (-int::<T>(4) * c4 + int::<T>(6) * c2 + int(7)) / (int::<T>(6) * q3),
                );
                ck.push(
                    "gamma-implicit",
                    &["alpha", "beta", "gamma", "b"],
                    g_shift,
                    a_bar[4],
                );
                ck.push(
                    "delta-implicit",
                    &["alpha", "beta", "gamma", "delta", "b"],
                    d_shift,
                    a_bar[5],
                );
            }
        }
        if set.family == Family::SurfaceRch {
            ck.push("surface-rch-gamma-delta", &["gamma", "delta"], two * gamma, delta);
            ck.push(
                "surface-rch-gamma",
                &["gamma"],
                gamma,
                -c3 * (int::<T>(8) * c2 - T::one()) / (three * q3),
            );
        }
    }

    ConstraintReport {
        tolerance,
        checks: ck.checks,
    }
}

/// A family choice with its free parameters, resolved at a given `omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyChoice {
    /// The rotating Camassa-Holm equation.
    Rch,
    /// The velocity family at `(p, lambda)`.
    Gbbm { p: f64, lambda: f64 },
    /// The surface family at `p`.
    Surface { p: f64, transcription: Transcription },
    /// The Camassa-Holm point of the surface family.
    SurfaceRch { transcription: Transcription },
}

impl FamilyChoice {
    /// Builds the coefficient set at Coriolis frequency `omega`.
    pub fn build(&self, omega: f64) -> Result<CoefficientSet<f64>> {
        match *self {
            FamilyChoice::Rch => rch_parameters(omega),
            FamilyChoice::Gbbm { p, lambda } => gbbm_velocity_family(omega, p, lambda),
            FamilyChoice::Surface { p, transcription } => surface_family(omega, p, transcription),
            FamilyChoice::SurfaceRch { transcription } => surface_rch_parameters(omega, transcription),
        }
    }

    /// Short name used in configuration files and reports.
    pub fn name(&self) -> &'static str {
        match self {
            FamilyChoice::Rch => "rch",
            FamilyChoice::Gbbm { .. } => "gbbm",
            FamilyChoice::Surface { .. } => "surface",
            FamilyChoice::SurfaceRch { .. } => "surface-rch",
        }
    }
}
