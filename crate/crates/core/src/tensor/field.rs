//! Vector fields and one-forms on ℝ^{2n+1} with exact polynomial coefficients.

use std::fmt;

use num_traits::{One, Signed};

use super::forms::{OneFormField, VectorField};
use super::jet::Scalar;
use super::poly::{int, CompiledPoly, Poly, Rational};
use crate::error::{check_dim, Result};

fn dim_of(n: usize) -> usize {
    2 * n + 1
}

/// `X = Σ X^k ∂_k` with polynomial coefficients `X^k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyVectorField {
    n: usize,
    comps: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(n: usize, comps: Vec<Poly>) -> Result<Self> {
        check_dim(dim_of(n), comps.len())?;
        for c in &comps {
            check_dim(dim_of(n), c.nvars())?;
        }
        Ok(PolyVectorField { n, comps })
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField {
            n,
            comps: vec![Poly::zero(dim_of(n)); dim_of(n)],
        }
    }

    /// The coordinate field `∂_k`.
    pub fn coord(n: usize, k: usize) -> Self {
        let mut f = PolyVectorField::zero(n);
        f.comps[k] = Poly::one(dim_of(n));
        f
    }

    /// `Σ_k coeff_k ∂_k` for a list of `(k, coeff)` pairs.
    pub fn from_pairs(n: usize, pairs: Vec<(usize, Poly)>) -> Self {
        let mut f = PolyVectorField::zero(n);
        for (k, p) in pairs {
            f.comps[k] = &f.comps[k] + &p;
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.comps[k]
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Directional derivative `X(f) = Σ X^j ∂_j f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut acc = Poly::zero(self.dim());
        for (j, xj) in self.comps.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            let d = f.derivative(j);
            if !d.is_zero() {
                acc = &acc + &(xj * &d);
            }
        }
        acc
    }

    /// Lie bracket `[X,Y]^k = Σ_j (X^j ∂_j Y^k − Y^j ∂_j X^k)`.
    pub fn bracket(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        check_dim(self.dim(), other.dim())?;
        let comps = (0..self.dim())
            .map(|k| &self.apply(&other.comps[k]) - &other.apply(&self.comps[k]))
            .collect();
        Ok(PolyVectorField { n: self.n, comps })
    }

    pub fn scale(&self, c: &Rational) -> PolyVectorField {
        PolyVectorField {
            n: self.n,
            comps: self.comps.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        check_dim(self.dim(), other.dim())?;
        Ok(PolyVectorField {
            n: self.n,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Multiply every component by the polynomial `f`.
    pub fn mul_poly(&self, f: &Poly) -> PolyVectorField {
        PolyVectorField {
            n: self.n,
            comps: self.comps.iter().map(|p| p * f).collect(),
        }
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    pub fn eval_exact(&self, p: &[Rational]) -> Vec<Rational> {
        self.comps.iter().map(|c| c.eval_exact(p)).collect()
    }

    /// Jacobian `∂_j X^k` as exact polynomials, indexed `[k][j]`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.comps
            .iter()
            .map(|c| (0..self.dim()).map(|j| c.derivative(j)).collect())
            .collect()
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField {
            comps: self.comps.iter().map(Poly::compile).collect(),
        }
    }
}

impl VectorField for PolyVectorField {
    fn dim(&self) -> usize {
        self.comps.len()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.eval(p)
    }
}

/// A [`PolyVectorField`] with `f64` coefficients, for ODE right-hand sides.
#[derive(Clone, Debug)]
pub struct CompiledField {
    comps: Vec<CompiledPoly>,
}

impl CompiledField {
    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    pub fn eval_into(&self, p: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = c.eval(p);
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }
}

fn basis_name(nvars: usize, k: usize) -> String {
    format!("∂{}", super::poly::coordinate_name(nvars, k))
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let name = basis_name(self.dim(), k);
                if c.num_terms() == 1 {
                    let (e, v) = c.terms().next().unwrap();
                    if e.iter().all(|&p| p == 0) && v.abs().is_one() {
                        let sign = if v.is_negative() { "-" } else { "" };
                        return format!("{}{}", sign, name);
                    }
                    format!("{}*{}", c, name)
                } else {
                    format!("({})*{}", c, name)
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
        }
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyVectorField({})", self)
    }
}

/// `ω = Σ ω_k dx^k` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyOneForm {
    n: usize,
    comps: Vec<Poly>,
}

impl PolyOneForm {
    pub fn new(n: usize, comps: Vec<Poly>) -> Result<Self> {
        check_dim(dim_of(n), comps.len())?;
        for c in &comps {
            check_dim(dim_of(n), c.nvars())?;
        }
        Ok(PolyOneForm { n, comps })
    }

    pub fn zero(n: usize) -> Self {
        PolyOneForm {
            n,
            comps: vec![Poly::zero(dim_of(n)); dim_of(n)],
        }
    }

    /// The differential `dx^k`.
    pub fn coord(n: usize, k: usize) -> Self {
        let mut w = PolyOneForm::zero(n);
        w.comps[k] = Poly::one(dim_of(n));
        w
    }

    /// `η^R = dz − Σ y_i dx_i`.
    pub fn eta_right(n: usize) -> Self {
        let d = dim_of(n);
        let mut w = PolyOneForm::coord(n, 2 * n);
        for i in 0..n {
            w.comps[i] = -&Poly::var(d, n + i);
        }
        w
    }

    /// `η^L = dz − Σ x_i dy_i`.
    pub fn eta_left(n: usize) -> Self {
        let d = dim_of(n);
        let mut w = PolyOneForm::coord(n, 2 * n);
        for i in 0..n {
            w.comps[n + i] = -&Poly::var(d, i);
        }
        w
    }

    /// `η = dz − 2 Σ (x_j dy_j − y_j dx_j)`.
    pub fn eta_intermediate(n: usize) -> Self {
        let d = dim_of(n);
        let mut w = PolyOneForm::coord(n, 2 * n);
        for i in 0..n {
            w.comps[i] = Poly::var(d, n + i).scale(&int(2));
            w.comps[n + i] = Poly::var(d, i).scale(&int(-2));
        }
        w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.comps[k]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    /// `ω(X)` as a polynomial.
    pub fn contract(&self, x: &PolyVectorField) -> Result<Poly> {
        check_dim(self.dim(), x.dim())?;
        let mut acc = Poly::zero(self.dim());
        for (w, v) in self.comps.iter().zip(x.components()) {
            acc = &acc + &(w * v);
        }
        Ok(acc)
    }

    /// `dω` as the antisymmetric matrix `Ω_ab = ∂_a ω_b − ∂_b ω_a`.
    pub fn exterior_derivative(&self) -> Vec<Vec<Poly>> {
        let d = self.dim();
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| &self.comps[b].derivative(a) - &self.comps[a].derivative(b))
                    .collect()
            })
            .collect()
    }

    /// Exact Lie derivative via Cartan's formula `£_X ω = d(ω(X)) + ι_X dω`.
    pub fn lie_derivative(&self, x: &PolyVectorField) -> Result<PolyOneForm> {
        check_dim(self.dim(), x.dim())?;
        let f = self.contract(x)?;
        let dw = self.exterior_derivative();
        let d = self.dim();
        let comps = (0..d)
            .map(|b| {
                let mut acc = f.derivative(b);
                for a in 0..d {
                    if !x.component(a).is_zero() && !dw[a][b].is_zero() {
                        acc = &acc + &(x.component(a) * &dw[a][b]);
                    }
                }
                acc
            })
            .collect();
        Ok(PolyOneForm { n: self.n, comps })
    }

    pub fn scale(&self, c: &Rational) -> PolyOneForm {
        PolyOneForm {
            n: self.n,
            comps: self.comps.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul_poly(&self, f: &Poly) -> PolyOneForm {
        PolyOneForm {
            n: self.n,
            comps: self.comps.iter().map(|p| p * f).collect(),
        }
    }

    pub fn sub(&self, other: &PolyOneForm) -> Result<PolyOneForm> {
        check_dim(self.dim(), other.dim())?;
        Ok(PolyOneForm {
            n: self.n,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        })
    }
}

impl OneFormField for PolyOneForm {
    fn dim(&self) -> usize {
        self.comps.len()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.eval(p)
    }
}

impl fmt::Debug for PolyOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                format!("({})*d{}", c, super::poly::coordinate_name(self.dim(), k))
            })
            .collect();
        write!(f, "PolyOneForm({})", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_right(n: usize, i: usize) -> PolyVectorField {
        let d = dim_of(n);
        PolyVectorField::from_pairs(n, vec![(i, Poly::one(d)), (2 * n, Poly::var(d, n + i))])
    }

    #[test]
    fn bracket_of_right_frame_is_minus_reeb() {
        let v = v_right(1, 0);
        let u = PolyVectorField::coord(1, 1);
        let b = v.bracket(&u).unwrap();
        assert_eq!(b, PolyVectorField::coord(1, 2).scale(&int(-1)));
    }

    #[test]
    fn self_bracket_vanishes() {
        let x = v_right(2, 1).mul_poly(&Poly::var(5, 3));
        assert!(x.bracket(&x).unwrap().is_zero());
    }

    #[test]
    fn dilation_bracket_with_r1() {
        let n = 1;
        let d = dim_of(n);
        let dil = PolyVectorField::from_pairs(
            n,
            vec![
                (0, Poly::var(d, 0)),
                (1, Poly::var(d, 1)),
                (2, Poly::var(d, 2).scale(&int(2))),
            ],
        );
        let r1 = PolyVectorField::coord(n, 0);
        assert_eq!(dil.bracket(&r1).unwrap(), r1.scale(&int(-1)));
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let a = PolyVectorField::coord(1, 0);
        let b = PolyVectorField::coord(2, 0);
        assert!(a.bracket(&b).is_err());
    }

    #[test]
    fn d_eta_right_and_left() {
        let dr = PolyOneForm::eta_right(1).exterior_derivative();
        assert_eq!(dr[0][1], Poly::one(3));
        assert_eq!(dr[1][0], Poly::constant(3, int(-1)));
        let dl = PolyOneForm::eta_left(1).exterior_derivative();
        assert_eq!(dl[0][1], Poly::constant(3, int(-1)));
        let dz = PolyOneForm::coord(1, 2).exterior_derivative();
        assert!(dz.iter().flatten().all(Poly::is_zero));
    }

    #[test]
    fn lie_derivative_of_eta_along_dilation() {
        let n = 2;
        let d = dim_of(n);
        let mut pairs: Vec<_> = (0..2 * n).map(|k| (k, Poly::var(d, k))).collect();
        pairs.push((2 * n, Poly::var(d, 2 * n).scale(&int(2))));
        let dil = PolyVectorField::from_pairs(n, pairs);
        let eta = PolyOneForm::eta_right(n);
        assert_eq!(eta.lie_derivative(&dil).unwrap(), eta.scale(&int(2)));
        let xi = PolyVectorField::coord(n, 2 * n);
        assert!(eta.lie_derivative(&xi).unwrap().is_zero());
    }

    #[test]
    fn display_reads_like_math() {
        let v = v_right(1, 0);
        assert_eq!(v.to_string(), "∂x1 + y1*∂z");
    }
}
