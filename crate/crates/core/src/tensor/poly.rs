//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::jet::Scalar;

pub type Rational = BigRational;

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Polynomial in `nvars` variables. Zero coefficients are never stored, so
/// the zero polynomial has an empty term map and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_i` (in flat indexing).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn monomial(exponents: Exponents, c: Rational) -> Self {
        let mut p = Poly::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponents: Exponents, c: Rational) {
        assert_eq!(exponents.len(), self.nvars, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the given monomial (zero if absent).
    pub fn coeff(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(exponents)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * int(e[i] as i64));
        }
        out
    }

    /// Substitute polynomials for the variables: `self(q_1, …, q_k)`.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars, "substitution arity mismatch");
        let target = subs.first().map(|q| q.nvars).unwrap_or(0);
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (k, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    term = &term * &subs[k];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Evaluate over any [`Scalar`]; coefficients are rounded to `f64`.
    pub fn eval<S: Scalar>(&self, p: &[S]) -> S {
        debug_assert_eq!(p.len(), self.nvars);
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut term = S::constant(c.to_f64().unwrap_or(f64::NAN));
            for (k, &pow) in e.iter().enumerate() {
                if pow > 0 {
                    term = term * p[k].powi(pow);
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, p: &[Rational]) -> Rational {
        assert_eq!(p.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (k, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    term *= &p[k];
                }
            }
            acc += term;
        }
        acc
    }

    /// Coefficients rounded to `f64`, for fast repeated numeric evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let factors = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0)
                        .map(|(k, &p)| (k, p))
                        .collect();
                    (c.to_f64().unwrap_or(f64::NAN), factors)
                })
                .collect(),
        }
    }
}

/// A [`Poly`] with `f64` coefficients and only the nonzero exponents kept.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, factors)| {
                factors
                    .iter()
                    .fold(*c, |acc, &(k, pow)| acc * p[k].powi(pow as i32))
            })
            .sum()
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Name of flat coordinate `k` in a `(2n+1)`-variable system.
pub fn coordinate_name(nvars: usize, k: usize) -> String {
    if nvars % 2 == 1 {
        let n = nvars / 2;
        if k < n {
            format!("x{}", k + 1)
        } else if k < 2 * n {
            format!("y{}", k - n + 1)
        } else {
            "z".to_string()
        }
    } else {
        format!("t{}", k + 1)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse(e.iter().sum::<u32>()));
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&p| p == 0);
            if !mag.is_one() || is_const {
                write!(f, "{}", mag)?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(k, &p)| {
                    let name = coordinate_name(self.nvars, k);
                    if p == 1 {
                        name
                    } else {
                        format!("{}^{}", name, p)
                    }
                })
                .collect();
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_normal_form_is_unique() {
        let x = Poly::var(3, 0);
        let diff = &x - &x;
        assert!(diff.is_zero());
        assert_eq!(diff, Poly::zero(3));
        assert_eq!(diff.num_terms(), 0);
    }

    #[test]
    fn derivative_of_product() {
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let p = &(&x * &x) * &y; // x² y
        assert_eq!(p.derivative(0), (&x * &y).scale(&int(2)));
        assert_eq!(p.derivative(1), &x * &x);
        assert!(p.derivative(2).is_zero());
    }

    #[test]
    fn compose_substitutes() {
        // p(u, v) = u v, u = x + 1, v = x - 1 -> x² - 1
        let x = Poly::var(1, 0);
        let one = Poly::one(1);
        let u = &x + &one;
        let v = &x - &one;
        let p = &Poly::var(2, 0) * &Poly::var(2, 1);
        let c = p.compose(&[u, v]);
        assert_eq!(c, &(&x * &x) - &one);
    }

    #[test]
    fn display_is_readable() {
        let x = Poly::var(3, 0);
        let z = Poly::var(3, 2);
        let p = &(&x * &x).scale(&rat(1, 2)) - &z;
        assert_eq!(p.to_string(), "1/2*x1^2 - z");
    }

    #[test]
    fn eval_exact_and_numeric_agree_on_dyadics() {
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let p = &(&x * &y) + &Poly::constant(3, rat(3, 4));
        let exact = p.eval_exact(&[rat(1, 2), rat(-3, 4), int(0)]);
        let num = p.eval(&[0.5, -0.75, 0.0]);
        assert_eq!(exact.to_f64().unwrap(), num);
        assert_eq!(p.compile().eval(&[0.5, -0.75, 0.0]), num);
    }
}
