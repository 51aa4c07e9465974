//! Second-order forward-mode jets over up to nine variables.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Maximum number of independent variables a [`Jet2`] tracks.
pub const MAX_VARS: usize = 9;

/// Scalar types that the geometry code can be evaluated over.
///
/// Implemented for `f64` (plain values) and [`Jet2`] (values with first and
/// second partial derivatives).
pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn powi(self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Truncated second-order Taylor expansion of a scalar function:
/// value, gradient and (symmetric) Hessian.
///
/// `dim` is the number of active variables; entries beyond it are zero.
/// Binary operations take the larger `dim` of their operands, so constants
/// (`dim == 0`) mix freely with seeded variables.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    dim: usize,
    value: f64,
    grad: [f64; MAX_VARS],
    hess: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 {
            dim: 0,
            value,
            grad: [0.0; MAX_VARS],
            hess: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// The coordinate function `x_index` among `dim` variables, at `value`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        assert!(dim <= MAX_VARS && index < dim, "jet variable out of range");
        let mut j = Jet2::constant(value);
        j.dim = dim;
        j.grad[index] = 1.0;
        j
    }

    /// Seed every coordinate of `p` as an independent variable.
    pub fn seed(p: &[f64]) -> Vec<Jet2> {
        p.iter()
            .enumerate()
            .map(|(i, &v)| Jet2::variable(v, i, p.len()))
            .collect()
    }

    /// Build a jet from explicit derivative data (used by tests and oracles).
    pub fn from_parts(value: f64, grad: &[f64], hess: &[Vec<f64>]) -> Self {
        let dim = grad.len();
        assert!(dim <= MAX_VARS && hess.len() == dim);
        let mut j = Jet2::constant(value);
        j.dim = dim;
        for i in 0..dim {
            j.grad[i] = grad[i];
            for k in 0..dim {
                j.hess[i][k] = hess[i][k];
            }
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    /// `∂_i f`; zero for inactive indices.
    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    /// `∂_i ∂_k f`.
    pub fn dd(&self, i: usize, k: usize) -> f64 {
        self.hess[i][k]
    }

    pub fn hessian(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.hess[i][..self.dim].to_vec())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        let d = self.dim;
        self.value.is_finite()
            && self.grad[..d].iter().all(|v| v.is_finite())
            && self.hess[..d].iter().all(|r| r[..d].iter().all(|v| v.is_finite()))
    }

    /// Chain rule for a smooth scalar function `f` given `f(u), f'(u), f''(u)`.
    pub fn compose(self, f0: f64, f1: f64, f2: f64) -> Self {
        let d = self.dim;
        let mut out = Jet2::constant(f0);
        out.dim = d;
        for i in 0..d {
            out.grad[i] = f1 * self.grad[i];
            for k in 0..d {
                out.hess[i][k] = f1 * self.hess[i][k] + f2 * self.grad[i] * self.grad[k];
            }
        }
        out
    }

    pub fn recip(self) -> Self {
        let u = self.value;
        self.compose(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let u = self.value;
        self.compose(u.ln(), 1.0 / u, -1.0 / (u * u))
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("grad", &self.gradient())
            .field("hess", &self.hessian())
            .finish()
    }
}

impl Scalar for Jet2 {
    fn constant(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }
    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * self.value))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        let d = self.dim.max(rhs.dim);
        self.dim = d;
        self.value += rhs.value;
        for i in 0..d {
            self.grad[i] += rhs.grad[i];
            for k in 0..d {
                self.hess[i][k] += rhs.hess[i][k];
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        let d = self.dim;
        self.value = -self.value;
        for i in 0..d {
            self.grad[i] = -self.grad[i];
            for k in 0..d {
                self.hess[i][k] = -self.hess[i][k];
            }
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let d = self.dim.max(rhs.dim);
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet2::constant(a * b);
        out.dim = d;
        for i in 0..d {
            out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
            for k in 0..d {
                out.hess[i][k] = a * rhs.hess[i][k]
                    + b * self.hess[i][k]
                    + self.grad[i] * rhs.grad[k]
                    + rhs.grad[i] * self.grad[k];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        let d = self.dim;
        self.value *= rhs;
        for i in 0..d {
            self.grad[i] *= rhs;
            for k in 0..d {
                self.hess[i][k] *= rhs;
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(p: &[f64]) -> Vec<Jet2> {
        Jet2::seed(p)
    }

    #[test]
    fn product_rule_on_monomial() {
        // f = x² y at (3, -2): grad (2xy, x²) = (-12, 9), hess [[2y, 2x], [2x, 0]]
        let v = vars(&[3.0, -2.0]);
        let f = v[0] * v[0] * v[1];
        assert_eq!(f.value(), -18.0);
        assert_eq!(f.gradient(), &[-12.0, 9.0]);
        assert_eq!(f.hessian(), vec![vec![-4.0, 6.0], vec![6.0, 0.0]]);
    }

    #[test]
    fn quotient_matches_hand_derivatives() {
        // f = 1 / (1 + x²) at x = 1: f = 1/2, f' = -1/2, f'' = 1/2
        let v = vars(&[1.0]);
        let f = (v[0] * v[0] + 1.0).recip();
        assert_eq!(f.value(), 0.5);
        assert_eq!(f.d(0), -0.5);
        assert_eq!(f.dd(0, 0), 0.5);
    }

    #[test]
    fn constants_mix_with_variables() {
        let v = vars(&[2.0, 5.0, 7.0]);
        let c = Jet2::constant(4.0);
        let f = c * v[2] + c;
        assert_eq!(f.dim(), 3);
        assert_eq!(f.gradient(), &[0.0, 0.0, 4.0]);
        assert_eq!(f.value(), 32.0);
    }

    #[test]
    fn trig_chain_rule() {
        let v = vars(&[0.3, 0.0]);
        let f = (v[0] * 2.0).sin();
        assert!((f.d(0) - 2.0 * (0.6f64).cos()).abs() < 1e-15);
        assert!((f.dd(0, 0) + 4.0 * (0.6f64).sin()).abs() < 1e-15);
    }

    #[test]
    fn hessian_is_symmetric() {
        let v = vars(&[0.7, -1.3, 2.1]);
        let f = (v[0] * v[1] + v[2]).recip() * (v[1] * v[2]).cos();
        for i in 0..3 {
            for k in 0..3 {
                assert!((f.dd(i, k) - f.dd(k, i)).abs() < 1e-14);
            }
        }
    }
}
