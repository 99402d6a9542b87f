//! Dense real univariate polynomials.

mod roots;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use roots::{
    solve_cubic, solve_iterative, solve_linear, solve_quadratic, solve_roots, RootMethod, RootSet,
    DEFAULT_IM_TOL, MAX_ITERATIONS,
};

/// Coefficients with `|a_i| <= LEADING_ZERO_TOL * max_j |a_j|` do not count
/// towards the degree.
pub const LEADING_ZERO_TOL: f64 = 1e-12;

/// A polynomial `a_0 + a_1 x + ... + a_n x^n` with real coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients in ascending order of power.
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `c * x^power`.
    pub fn monomial(c: f64, power: usize) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = c;
        Self { coeffs }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |acc, &r| {
            acc * Self::new(vec![-r, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the stored length.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest index whose coefficient exceeds the leading-zero tolerance.
    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        let tol = LEADING_ZERO_TOL * scale;
        self.coeffs.iter().rposition(|c| c.abs() > tol)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Drops coefficients above [`degree`](Self::degree).
    pub fn trimmed(&self) -> Self {
        match self.degree() {
            Some(d) => Self::new(self.coeffs[..=d].to_vec()),
            None => Self::zero(),
        }
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);
