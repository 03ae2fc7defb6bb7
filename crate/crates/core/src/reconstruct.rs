//! Changes of unknown tying scalar-model solutions to Green-Naghdi pairs.
//!
//! Velocity families carry the velocity `u_theta` at a depth level; the
//! averaged velocity is `u = u_theta + mu lambda u_theta_xx
//! + kappa (2 lambda / c) u_theta u_theta_xx` and the surface is
//! `eta = F(u)`. Surface families carry `eta` and give `u = G(eta)`.
//!
//! Every map is written against [`FieldAlgebra`], so evaluating it on a
//! [`TimeJet`] yields the exact time derivatives of the reconstructed
//! fields alongside their values.

use serde::Serialize;

use crate::algebra::{FieldAlgebra, TimeJet};
use crate::coefficients::{CoefficientSet, PhysicalParams};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::rch::ScalarModel;
use crate::scalar::Real;

/// Scaling of the quadratic term of the depth-level transform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaConvention {
    /// Coefficient `2 lambda / c` with no small-parameter factor.
    Unscaled,
    /// Coefficient `eps mu (2 lambda / c)`, consistent with the ordering of
    /// the other correction terms.
    #[default]
    EpsilonMuScaled,
}

impl ThetaConvention {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unscaled" => Some(Self::Unscaled),
            "epsilon-mu-scaled" => Some(Self::EpsilonMuScaled),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Unscaled => "unscaled",
            Self::EpsilonMuScaled => "epsilon-mu-scaled",
        }
    }
}

/// Everything a reconstruction needs besides the scalar state.
#[derive(Clone, Debug)]
pub struct ReconstructionSpec<T: Real> {
    pub coeffs: CoefficientSet<T>,
    pub params: PhysicalParams,
    pub theta_convention: ThetaConvention,
}

impl<T: Real> ReconstructionSpec<T> {
    pub fn new(coeffs: CoefficientSet<T>, params: PhysicalParams) -> Self {
        Self {
            coeffs,
            params,
            theta_convention: ThetaConvention::default(),
        }
    }

    fn eps(&self) -> T {
        T::lit(self.params.epsilon)
    }

    fn mu(&self) -> T {
        T::lit(self.params.mu)
    }
}

/// `eta = F(u)` for velocity families:
/// `u/c - eps h* u^2 + eps^2 A3 u^3 + eps^3 (2 omega A3 + omega2/4) u^4
///  + mu (1/3 + beta - alpha/c) u_xt - eps mu (A1 u u_xx + A2 u_x^2)`.
pub fn eta_from_u<T: Real, A: FieldAlgebra<T>>(u: &A, u_t: &A, spec: &ReconstructionSpec<T>) -> Result<A> {
    Field::check_same_grid(&[u.value(), u_t.value()])?;
    let k = spec.coeffs.velocity.as_ref().ok_or_else(|| {
        Error::Domain(format!(
            "eta_from_u needs a velocity family, got {:?}",
            spec.coeffs.family
        ))
    })?;
    let (eps, mu) = (spec.eps(), spec.mu());
    let u2 = u.product(u);
    let u3 = u2.product(u);
    let u4 = u2.product(&u2);
    let mut eta = u
        .scale(T::one() / spec.coeffs.c)
        .axpy(-eps * k.h_star, &u2)
        .axpy(eps * eps * k.a3, &u3)
        .axpy(eps * eps * eps * k.quartic_coefficient, &u4)
        .axpy(mu * k.mu_coefficient, &u_t.deriv(1)?);
    let em = eps * mu;
    if em != T::zero() {
        let ux = u.deriv(1)?;
        eta = eta
            .axpy(-em * k.a1, &u.product(&u.deriv(2)?))
            .axpy(-em * k.a2, &ux.product(&ux));
    }
    Ok(eta)
}

/// `u = u_theta + mu lambda u_theta_xx + kappa (2 lambda / c) u_theta u_theta_xx`
/// with `kappa` set by the convention.
pub fn theta_transform<T: Real, A: FieldAlgebra<T>>(u_theta: &A, spec: &ReconstructionSpec<T>) -> Result<A> {
    let lambda = spec.coeffs.lambda;
    if lambda == T::zero() {
        return Ok(u_theta.clone());
    }
    let kappa = match spec.theta_convention {
        ThetaConvention::Unscaled => T::one(),
        ThetaConvention::EpsilonMuScaled => spec.eps() * spec.mu(),
    };
    let uxx = u_theta.deriv(2)?;
    Ok(u_theta
        .axpy(spec.mu() * lambda, &uxx)
        .axpy(kappa * T::lit(2.0) * lambda / spec.coeffs.c, &u_theta.product(&uxx)))
}

/// `u = G(eta)` for surface families:
/// `c eta + eps g2 eta^2 + mu g_xt eta_xt + eps^2 g3 eta^3 + eps^3 g4 eta^4
///  + eps mu (g_a eta eta_xx + g_b eta_x^2)`.
pub fn u_from_eta<T: Real, A: FieldAlgebra<T>>(eta: &A, eta_t: &A, spec: &ReconstructionSpec<T>) -> Result<A> {
    Field::check_same_grid(&[eta.value(), eta_t.value()])?;
    let m = spec.coeffs.surface.as_ref().map(|s| s.map).ok_or_else(|| {
        Error::Domain(format!(
            "u_from_eta needs a surface family, got {:?}",
            spec.coeffs.family
        ))
    })?;
    let (eps, mu) = (spec.eps(), spec.mu());
    let e2 = eta.product(eta);
    let e3 = e2.product(eta);
    let e4 = e2.product(&e2);
    let mut u = eta
        .scale(spec.coeffs.c)
        .axpy(eps * m.eta2, &e2)
        .axpy(mu * m.eta_xt, &eta_t.deriv(1)?)
        .axpy(eps * eps * m.eta3, &e3)
        .axpy(eps * eps * eps * m.eta4, &e4);
    let em = eps * mu;
    if em != T::zero() {
        let ex = eta.deriv(1)?;
        u = u
            .axpy(em * m.eta_etaxx, &eta.product(&eta.deriv(2)?))
            .axpy(em * m.etax2, &ex.product(&ex));
    }
    Ok(u)
}

/// A reconstructed Green-Naghdi pair with its time derivatives.
#[derive(Clone, Debug)]
pub struct ReconstructedPair<T: Real> {
    pub eta: Field<T>,
    pub eta_t: Field<T>,
    pub u: Field<T>,
    pub u_t: Field<T>,
}

/// Builds `(eta, eta_t, u, u_t)` from a scalar-model state `w`.
///
/// The time derivatives of `w` come from the model itself: `w_t` is its
/// right-hand side and `w_tt` is the right-hand side evaluated on the jet
/// `(w, w_t)`.
pub fn reconstruct_pair<T: Real>(
    model: &ScalarModel<T>,
    w: &Field<T>,
    spec: &ReconstructionSpec<T>,
) -> Result<ReconstructedPair<T>> {
    if !w.same_grid(&Field::zeros(&model.grid)) {
        return Err(Error::GridMismatch);
    }
    let w_t = model.rhs(w)?;
    let w_tt = model
        .rhs(&TimeJet::new(vec![w.clone(), w_t.clone()]))?
        .derivative(1)
        .clone();
    let jet = TimeJet::new(vec![w.clone(), w_t, w_tt]);
    if spec.coeffs.is_velocity() {
        let u = theta_transform(&jet, spec)?;
        let eta = eta_from_u(&truncate(&u, 1), &u.time_derivative(), spec)?;
        Ok(pair(eta, truncate(&u, 1)))
    } else {
        let u = u_from_eta(&truncate(&jet, 1), &jet.time_derivative(), spec)?;
        Ok(pair(truncate(&jet, 1), u))
    }
}

fn truncate<T: Real>(jet: &TimeJet<T>, order: usize) -> TimeJet<T> {
    TimeJet::new(jet.clone().into_parts().into_iter().take(order + 1).collect())
}

fn pair<T: Real>(eta: TimeJet<T>, u: TimeJet<T>) -> ReconstructedPair<T> {
    let mut e = eta.into_parts().into_iter();
    let mut v = u.into_parts().into_iter();
    ReconstructedPair {
        eta: e.next().expect("value"),
        eta_t: e.next().expect("first derivative"),
        u: v.next().expect("value"),
        u_t: v.next().expect("first derivative"),
    }
}
