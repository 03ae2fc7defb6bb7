//! Periodic grids and the spectral operators acting on their fields.
//!
//! A [`Grid`] owns the FFT plans and the per-mode multipliers of one
//! [`GridSpec`]; a [`Field`] holds real samples together with a shared
//! handle to its grid. Derivatives use either exact Fourier multipliers or
//! fourth-order centered stencils. Sobolev norms and the constant-coefficient
//! Helmholtz solve always go through the FFT; with the stencil backend the
//! solve divides by the stencil's own symbol, so it inverts exactly the
//! discrete operator built from [`Field::deriv`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Derivative discretization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Exact multiplication by `(ik)^m` in Fourier space.
    #[default]
    Fourier,
    /// Fourth-order centered finite differences with periodic wrap.
    Fd4,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Fourier => "fourier",
            Backend::Fd4 => "fd4",
        })
    }
}

/// Shape of a periodic grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of points, a power of two no smaller than 32.
    pub n: usize,
    /// Domain period.
    pub length: f64,
    pub backend: Backend,
    /// Whether solver products are projected with the two-thirds rule.
    pub dealias: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 512,
            length: 64.0,
            backend: Backend::Fourier,
            dealias: true,
        }
    }
}

impl GridSpec {
    /// Checks the size and period.
    pub fn validate(&self) -> Result<()> {
        if self.n < 32 || !self.n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid size n = {} must be a power of two >= 32",
                self.n
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Domain(format!(
                "grid length {} must be positive",
                self.length
            )));
        }
        Ok(())
    }

    /// Grid spacing `L / n`.
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }
}

/// Precomputed transforms and multipliers for one [`GridSpec`].
pub struct Grid<T: Real> {
    spec: GridSpec,
    dx: T,
    length: T,
    /// Wavenumbers in FFT order.
    k: Vec<T>,
    /// Symbol of the second derivative of the active backend.
    d2_symbol: Vec<T>,
    keep: Vec<bool>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl<T: Real> Grid<T> {
    /// Builds the grid, validating the spec.
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let n = spec.n;
        let length = T::lit(spec.length);
        let dx = length / T::lit(n as f64);
        let two_pi = T::lit(2.0) * T::PI();
        let half = (n / 2) as i64;
        let index = |i: usize| -> i64 {
            let i = i as i64;
            if i < half {
                i
            } else {
                i - n as i64
            }
        };
        let k: Vec<T> = (0..n)
            .map(|i| two_pi * T::lit(index(i) as f64) / length)
            .collect();
        let d2_symbol = match spec.backend {
            Backend::Fourier => k.iter().map(|&k| -k * k).collect(),
            Backend::Fd4 => k
                .iter()
                .map(|&k| {
                    let t = k * dx;
                    (T::lit(-2.0) * (t + t).cos() + T::lit(32.0) * t.cos() - T::lit(30.0))
                        / (T::lit(12.0) * dx * dx)
                })
                .collect(),
        };
        let cutoff = (n / 3) as i64;
        let keep = (0..n).map(|i| index(i).abs() <= cutoff).collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            spec,
            dx,
            length,
            k,
            d2_symbol,
            keep,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// Wavenumbers in FFT order (`0, 1, ..., n/2-1, -n/2, ..., -1` times `2 pi / L`).
    pub fn wavenumbers(&self) -> &[T] {
        &self.k
    }

    /// Symbol of the backend's second-derivative operator at each mode.
    pub fn second_derivative_symbol(&self) -> &[T] {
        &self.d2_symbol
    }

    /// Sample abscissae `x_j = j dx`.
    pub fn points(&self) -> Vec<T> {
        (0..self.n()).map(|j| T::lit(j as f64) * self.dx).collect()
    }

    /// Discrete Fourier coefficients `f_hat_k = (1/n) sum_j f_j exp(-i k x_j)`.
    pub fn spectrum(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward.process(&mut buf);
        let inv_n = T::one() / T::lit(self.n() as f64);
        for z in &mut buf {
            *z = *z * inv_n;
        }
        buf
    }

    /// Real samples from Fourier coefficients normalized as in [`Grid::spectrum`].
    pub fn synthesize(&self, mut spectrum: Vec<Complex<T>>) -> Vec<T> {
        self.inverse.process(&mut spectrum);
        spectrum.into_iter().map(|z| z.re).collect()
    }

    fn apply_multiplier(&self, values: &[T], m: impl Fn(usize) -> Complex<T>) -> Vec<T> {
        let mut s = self.spectrum(values);
        for (i, z) in s.iter_mut().enumerate() {
            *z = *z * m(i);
        }
        self.synthesize(s)
    }

    fn is_nyquist(&self, i: usize) -> bool {
        i == self.n() / 2
    }
}

/// Real samples on a periodic grid.
#[derive(Clone)]
pub struct Field<T: Real> {
    values: Vec<T>,
    grid: Arc<Grid<T>>,
}

impl<T: Real> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.values.len())
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl<T: Real> Field<T> {
    /// Wraps samples; their count must match the grid.
    pub fn from_values(grid: &Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        Ok(Self {
            values,
            grid: Arc::clone(grid),
        })
    }

    /// Samples `f(x_j)` at the grid points.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn(T) -> T) -> Self {
        Self {
            values: grid.points().into_iter().map(f).collect(),
            grid: Arc::clone(grid),
        }
    }

    /// The constant field `v`.
    pub fn constant(grid: &Arc<Grid<T>>, v: T) -> Self {
        Self {
            values: vec![v; grid.n()],
            grid: Arc::clone(grid),
        }
    }

    /// The zero field.
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    /// Whether `other` is defined on an identical grid.
    pub fn same_grid(&self, other: &Field<T>) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.spec == other.grid.spec
    }

    /// Errors with [`Error::GridMismatch`] unless all fields share a grid.
    pub fn check_same_grid(fields: &[&Field<T>]) -> Result<()> {
        match fields.split_first() {
            Some((first, rest)) if rest.iter().any(|f| !first.same_grid(f)) => {
                Err(Error::GridMismatch)
            }
            _ => Ok(()),
        }
    }

    fn assert_same_grid(&self, other: &Field<T>) {
        assert!(self.same_grid(other), "fields live on different grids");
    }

    fn zip_with(&self, other: &Field<T>, f: impl Fn(T, T) -> T) -> Field<T> {
        self.assert_same_grid(other);
        Field {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            grid: Arc::clone(&self.grid),
        }
    }

    /// Applies `f` pointwise.
    pub fn map(&self, f: impl Fn(T) -> T) -> Field<T> {
        Field {
            values: self.values.iter().map(|&v| f(v)).collect(),
            grid: Arc::clone(&self.grid),
        }
    }

    /// Pointwise product without projection.
    pub fn mul_exact(&self, other: &Field<T>) -> Field<T> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Pointwise product, projected with the two-thirds rule when the grid
    /// requests dealiasing.
    pub fn product(&self, other: &Field<T>) -> Field<T> {
        let p = self.mul_exact(other);
        if self.grid.spec.dealias {
            p.dealiased()
        } else {
            p
        }
    }

    /// `self * a`.
    pub fn scale(&self, a: T) -> Field<T> {
        self.map(|v| v * a)
    }

    /// `self + a` pointwise.
    pub fn shift(&self, a: T) -> Field<T> {
        self.map(|v| v + a)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: T, other: &Field<T>) -> Field<T> {
        self.zip_with(other, |x, y| x + a * y)
    }

    /// Zeroes every mode with `|j| > n/3`.
    pub fn dealiased(&self) -> Field<T> {
        let mut s = self.grid.spectrum(&self.values);
        for (z, &keep) in s.iter_mut().zip(&self.grid.keep) {
            if !keep {
                *z = Complex::new(T::zero(), T::zero());
            }
        }
        Field {
            values: self.grid.synthesize(s),
            grid: Arc::clone(&self.grid),
        }
    }

    /// Spatial derivative of order between 1 and 3 with the grid's backend.
    pub fn deriv(&self, order: u32) -> Result<Field<T>> {
        if !(1..=3).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        let values = match self.grid.spec.backend {
            Backend::Fourier => self.fourier_deriv(order),
            Backend::Fd4 => self.fd4_deriv(order),
        };
        Ok(Field {
            values,
            grid: Arc::clone(&self.grid),
        })
    }

    fn fourier_deriv(&self, order: u32) -> Vec<T> {
        let g = &self.grid;
        g.apply_multiplier(&self.values, |i| {
            if order % 2 == 1 && g.is_nyquist(i) {
                return Complex::new(T::zero(), T::zero());
            }
            let ik = Complex::new(T::zero(), g.k[i]);
            (0..order).fold(Complex::new(T::one(), T::zero()), |acc, _| acc * ik)
        })
    }

    fn fd4_deriv(&self, order: u32) -> Vec<T> {
        let n = self.values.len();
        let f = &self.values;
        let at = |j: usize, off: i64| f[((j as i64 + off).rem_euclid(n as i64)) as usize];
        let h = self.grid.dx;
        let c = T::lit;
        (0..n)
            .map(|j| match order {
                1 => (-at(j, 2) + c(8.0) * at(j, 1) - c(8.0) * at(j, -1) + at(j, -2)) / (c(12.0) * h),
                2 => {
                    (-at(j, 2) + c(16.0) * at(j, 1) - c(30.0) * at(j, 0) + c(16.0) * at(j, -1)
                        - at(j, -2))
                        / (c(12.0) * h * h)
                }
                _ => {
                    (-at(j, 3) + c(8.0) * at(j, 2) - c(13.0) * at(j, 1) + c(13.0) * at(j, -1)
                        - c(8.0) * at(j, -2)
                        + at(j, -3))
                        / (c(8.0) * h * h * h)
                }
            })
            .collect()
    }

    /// Solves `(a - b d_xx) g = self`, with `d_xx` the backend's second
    /// derivative.
    pub fn helmholtz_solve(&self, a: T, b: T) -> Result<Field<T>> {
        let g = &self.grid;
        let mut s = g.spectrum(&self.values);
        for (z, &d2) in s.iter_mut().zip(&g.d2_symbol) {
            let symbol = a - b * d2;
            if !(symbol > T::zero()) {
                return Err(Error::Positivity(format!(
                    "Helmholtz symbol {symbol} is not positive (a = {a}, b = {b})"
                )));
            }
            *z = *z / symbol;
        }
        Ok(Field {
            values: g.synthesize(s),
            grid: Arc::clone(g),
        })
    }

    /// Applies `(a - b d_xx)` spectrally.
    pub fn helmholtz_apply(&self, a: T, b: T) -> Field<T> {
        let g = &self.grid;
        Field {
            values: g.apply_multiplier(&self.values, |i| {
                Complex::new(a - b * g.d2_symbol[i], T::zero())
            }),
            grid: Arc::clone(g),
        }
    }

    /// Discrete `H^s` norm `sqrt(L sum_k (1 + k^2)^s |f_hat_k|^2)`.
    pub fn sobolev_norm(&self, s: T) -> T {
        let g = &self.grid;
        let spec = g.spectrum(&self.values);
        let sum = spec
            .iter()
            .zip(&g.k)
            .fold(T::zero(), |acc, (z, &k)| acc + (T::one() + k * k).powf(s) * z.norm_sqr());
        (g.length * sum).sqrt()
    }

    /// Rectangle-rule quadrature `sum_j f_j dx`.
    pub fn integrate_dx(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v) * self.grid.dx
    }

    /// Discrete inner product `sum_j f_j g_j dx`.
    pub fn inner(&self, other: &Field<T>) -> T {
        self.assert_same_grid(other);
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |a, (&x, &y)| a + x * y)
            * self.grid.dx
    }

    /// Mean value over the period.
    pub fn mean(&self) -> T {
        self.integrate_dx() / self.grid.length
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    /// Whether every sample is finite.
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Cyclic shift by `s` grid points (`out_j = f_{j - s}`).
    pub fn roll(&self, s: usize) -> Field<T> {
        let n = self.values.len();
        Field {
            values: (0..n).map(|j| self.values[(j + n - s % n) % n]).collect(),
            grid: Arc::clone(&self.grid),
        }
    }
}

impl<T: Real> Add for &Field<T> {
    type Output = Field<T>;
    fn add(self, rhs: &Field<T>) -> Field<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Field<T> {
    type Output = Field<T>;
    fn sub(self, rhs: &Field<T>) -> Field<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &Field<T> {
    type Output = Field<T>;
    /// Exact pointwise product (no projection).
    fn mul(self, rhs: &Field<T>) -> Field<T> {
        self.mul_exact(rhs)
    }
}

impl<T: Real> Neg for &Field<T> {
    type Output = Field<T>;
    fn neg(self) -> Field<T> {
        self.map(|v| -v)
    }
}
