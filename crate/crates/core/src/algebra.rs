//! A small algebra over fields, implemented by plain fields and by
//! truncated Taylor jets in time.
//!
//! Model right-hand sides and reconstruction maps are written once against
//! [`FieldAlgebra`]. Evaluated on a [`Field`] they give values; evaluated on
//! a [`TimeJet`] they also give exact time derivatives by the Leibniz rule.
//! This is how the time derivatives needed by the reconstruction maps and
//! the consistency residual are obtained without differencing stored time
//! levels.

use crate::error::Result;
use crate::grid::Field;
use crate::scalar::Real;

/// Operations needed by the model right-hand sides and maps.
pub trait FieldAlgebra<T: Real>: Clone + Sized {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    /// Pointwise product under the grid's dealiasing policy.
    fn product(&self, other: &Self) -> Self;
    fn scale(&self, a: T) -> Self;
    /// Adds the constant `a` to the value (not to time derivatives).
    fn shift(&self, a: T) -> Self;
    fn deriv(&self, order: u32) -> Result<Self>;
    /// Solves `(a - b d_xx) g = self`.
    fn helmholtz_solve(&self, a: T, b: T) -> Result<Self>;
    /// The value component.
    fn value(&self) -> &Field<T>;

    /// `self + a * other`.
    fn axpy(&self, a: T, other: &Self) -> Self {
        self.add(&other.scale(a))
    }
}

impl<T: Real> FieldAlgebra<T> for Field<T> {
    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn product(&self, other: &Self) -> Self {
        Field::product(self, other)
    }

    fn scale(&self, a: T) -> Self {
        Field::scale(self, a)
    }

    fn shift(&self, a: T) -> Self {
        Field::shift(self, a)
    }

    fn deriv(&self, order: u32) -> Result<Self> {
        Field::deriv(self, order)
    }

    fn helmholtz_solve(&self, a: T, b: T) -> Result<Self> {
        Field::helmholtz_solve(self, a, b)
    }

    fn value(&self) -> &Field<T> {
        self
    }

    fn axpy(&self, a: T, other: &Self) -> Self {
        Field::axpy(self, a, other)
    }
}

/// A field together with its first time derivatives: `d[k]` holds
/// `d^k f / dt^k`.
#[derive(Clone, Debug)]
pub struct TimeJet<T: Real> {
    d: Vec<Field<T>>,
}

impl<T: Real> TimeJet<T> {
    /// Builds a jet from its derivative sequence (at least the value).
    pub fn new(d: Vec<Field<T>>) -> Self {
        assert!(!d.is_empty(), "a jet needs at least a value");
        Self { d }
    }

    /// Highest time-derivative order carried.
    pub fn order(&self) -> usize {
        self.d.len() - 1
    }

    /// The `k`-th time derivative.
    pub fn derivative(&self, k: usize) -> &Field<T> {
        &self.d[k]
    }

    pub fn into_parts(self) -> Vec<Field<T>> {
        self.d
    }

    /// The jet of `d/dt` of this jet, one order shorter.
    pub fn time_derivative(&self) -> TimeJet<T> {
        assert!(self.d.len() > 1, "no time derivative available");
        Self {
            d: self.d[1..].to_vec(),
        }
    }

    fn each(&self, f: impl Fn(&Field<T>) -> Field<T>) -> Self {
        Self {
            d: self.d.iter().map(f).collect(),
        }
    }

    fn try_each(&self, f: impl Fn(&Field<T>) -> Result<Field<T>>) -> Result<Self> {
        Ok(Self {
            d: self.d.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn zip(&self, other: &Self, f: impl Fn(&Field<T>, &Field<T>) -> Field<T>) -> Self {
        Self {
            d: self.d.iter().zip(&other.d).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl<T: Real> FieldAlgebra<T> for TimeJet<T> {
    fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn product(&self, other: &Self) -> Self {
        let order = self.d.len().min(other.d.len());
        let d = (0..order)
            .map(|k| {
                let terms = (0..=k).map(|j| {
                    let p = self.d[j].mul_exact(&other.d[k - j]);
                    if j == 0 || j == k {
                        p
                    } else {
                        p.scale(T::lit(binomial(k, j)))
                    }
                });
                let sum = terms.reduce(|a, b| &a + &b).expect("non-empty sum");
                if sum.grid().spec().dealias {
                    sum.dealiased()
                } else {
                    sum
                }
            })
            .collect();
        Self { d }
    }

    fn scale(&self, a: T) -> Self {
        self.each(|f| f.scale(a))
    }

    fn shift(&self, a: T) -> Self {
        let mut out = self.clone();
        out.d[0] = out.d[0].shift(a);
        out
    }

    fn deriv(&self, order: u32) -> Result<Self> {
        self.try_each(|f| f.deriv(order))
    }

    fn helmholtz_solve(&self, a: T, b: T) -> Result<Self> {
        self.try_each(|f| f.helmholtz_solve(a, b))
    }

    fn value(&self) -> &Field<T> {
        &self.d[0]
    }
}
