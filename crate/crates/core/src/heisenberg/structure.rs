//! Contact metric structures `(ξ, η, Φ, g)` on ℝ^{2n+1}.
//!
//! The metric is always built by the canonical recipe
//! `g = ½·dη∘(Φ⊗1) + η⊗η`, i.e. half the Levi form on `D = ker η` plus the
//! vertical part. With `dω` taken without a ½ factor this is the
//! normalisation in which `dη = 2g(·, Φ·)` and the structures are Sasakian.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::sasaki_cone::ConeParams;
use crate::tensor::forms::{exterior_derivative, MetricField, OneFormField, VectorField};
use crate::tensor::jet::Scalar;
use crate::tensor::poly::Poly;
use crate::tensor::{PolyOneForm, PolyVectorField};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Model {
    Right,
    Left,
    Intermediate,
    Deformed(ConeParams),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Right => "right",
            Model::Left => "left",
            Model::Intermediate => "intermediate",
            Model::Deformed(_) => "deformed",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Deformed(a) => write!(f, "deformed{:?}", a.a()),
            m => write!(f, "{}", m.name()),
        }
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "right" => Ok(Model::Right),
            "left" => Ok(Model::Left),
            "intermediate" => Ok(Model::Intermediate),
            other => Err(Error::InvalidParameter(format!(
                "unknown model '{}', expected right | left | intermediate",
                other
            ))),
        }
    }
}

/// A contact metric structure whose tensors can be evaluated over any
/// [`Scalar`]. `phi(p)[a][b]` is the `a`-component of `Φ∂_b`; `d_eta(p)` is
/// the component matrix `dη(∂_a, ∂_b)`.
pub trait ContactMetric {
    fn n(&self) -> usize;
    fn xi<S: Scalar>(&self, p: &[S]) -> Vec<S>;
    fn eta<S: Scalar>(&self, p: &[S]) -> Vec<S>;
    fn d_eta<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>>;
    fn phi<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>>;

    fn dim(&self) -> usize {
        2 * self.n() + 1
    }

    fn metric<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        canonical_metric(&self.eta(p), &self.phi(p), &self.d_eta(p))
    }

    fn metric_field(&self) -> MetricOf<'_, Self>
    where
        Self: Sized,
    {
        MetricOf(self)
    }

    fn eta_field(&self) -> EtaOf<'_, Self>
    where
        Self: Sized,
    {
        EtaOf(self)
    }

    fn xi_vector_field(&self) -> XiOf<'_, Self>
    where
        Self: Sized,
    {
        XiOf(self)
    }

    /// Max-abs residuals of the defining identities at `p`.
    fn structure_residuals(&self, p: &[f64]) -> Result<StructureResiduals>
    where
        Self: Sized,
    {
        check_dim(self.dim(), p.len())?;
        let d = self.dim();
        let xi = self.xi(p);
        let eta = self.eta(p);
        let phi = self.phi(p);
        let g = self.metric(p);
        let omega = self.d_eta(p);
        let omega_jet = exterior_derivative(&self.eta_field(), p)?;

        let eta_xi = (dotv(&eta, &xi) - 1.0).abs();
        let phi_xi = (0..d)
            .map(|a| dotv(&phi[a], &xi).abs())
            .fold(0.0, f64::max);
        let mut phi_squared: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let sq: f64 = (0..d).map(|c| phi[a][c] * phi[c][b]).sum();
                let id = if a == b { 1.0 } else { 0.0 };
                phi_squared = phi_squared.max((sq + id - xi[a] * eta[b]).abs());
            }
        }
        let g_xi_eta = (0..d)
            .map(|b| ((0..d).map(|a| xi[a] * g[a][b]).sum::<f64>() - eta[b]).abs())
            .fold(0.0, f64::max);
        let recipe = canonical_metric(&eta, &phi, &omega);
        let recipe_res = max_diff(&g, &recipe);
        let reeb = (0..d)
            .map(|b| (0..d).map(|a| xi[a] * omega[a][b]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        let d_eta = max_diff(&omega, &omega_jet);
        let mut symmetry: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                symmetry = symmetry.max((g[a][b] - g[b][a]).abs());
            }
        }
        Ok(StructureResiduals {
            eta_xi,
            phi_xi,
            phi_squared,
            g_xi_eta,
            recipe: recipe_res,
            reeb,
            d_eta,
            symmetry,
        })
    }
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// `g_cb = ½ Σ_a Φ^a_c Ω_ab + η_c η_b`.
pub fn canonical_metric<S: Scalar>(eta: &[S], phi: &[Vec<S>], omega: &[Vec<S>]) -> Vec<Vec<S>> {
    let d = eta.len();
    (0..d)
        .map(|c| {
            (0..d)
                .map(|b| {
                    let mut acc = eta[c] * eta[b];
                    for a in 0..d {
                        acc = acc + phi[a][c] * omega[a][b] * 0.5;
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StructureResiduals {
    /// `|η(ξ) − 1|`
    pub eta_xi: f64,
    /// `|Φξ|`
    pub phi_xi: f64,
    /// `|Φ² + Id − ξ⊗η|`
    pub phi_squared: f64,
    /// `|g(ξ,·) − η|`
    pub g_xi_eta: f64,
    /// `|g − (½dη∘(Φ⊗1) + η⊗η)|`
    pub recipe: f64,
    /// `|ι_ξ dη|`
    pub reeb: f64,
    /// closed-form `dη` against the jet-derived exterior derivative
    pub d_eta: f64,
    pub symmetry: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        [
            self.eta_xi,
            self.phi_xi,
            self.phi_squared,
            self.g_xi_eta,
            self.recipe,
            self.reeb,
            self.d_eta,
            self.symmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn named(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("eta_xi", self.eta_xi),
            ("phi_xi", self.phi_xi),
            ("phi_squared", self.phi_squared),
            ("g_xi_eta", self.g_xi_eta),
            ("recipe", self.recipe),
            ("reeb", self.reeb),
            ("d_eta", self.d_eta),
            ("symmetry", self.symmetry),
        ]
    }
}

/// One of the right, left, intermediate or deformed Sasakian structures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SasakiStructure {
    n: usize,
    model: Model,
}

pub fn standard_structure(model: Model, n: usize) -> Result<SasakiStructure> {
    SasakiStructure::new(model, n)
}

impl SasakiStructure {
    pub fn new(model: Model, n: usize) -> Result<Self> {
        if n == 0 || n > crate::MAX_N {
            return Err(Error::InvalidParameter(format!(
                "n must be in 1..={}, got {}",
                crate::MAX_N,
                n
            )));
        }
        if let Model::Deformed(a) = &model {
            check_dim(n, a.a().len())?;
        }
        Ok(SasakiStructure { n, model })
    }

    pub fn right(n: usize) -> Result<Self> {
        Self::new(Model::Right, n)
    }

    pub fn left(n: usize) -> Result<Self> {
        Self::new(Model::Left, n)
    }

    pub fn intermediate(n: usize) -> Result<Self> {
        Self::new(Model::Intermediate, n)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn weights(&self) -> Option<&[f64]> {
        match &self.model {
            Model::Deformed(a) => Some(a.a()),
            _ => None,
        }
    }

    /// Orientation of `J` on `(∂x_i, ∂y_i)`: `J∂x_i = s·∂y_i`.
    fn j_sign(&self) -> f64 {
        match self.model {
            Model::Right | Model::Deformed(_) => -1.0,
            Model::Left | Model::Intermediate => 1.0,
        }
    }

    /// The undeformed contact form's components.
    fn eta0<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.n;
        let mut e = vec![S::zero(); 2 * n + 1];
        e[2 * n] = S::one();
        for i in 0..n {
            match self.model {
                Model::Right | Model::Deformed(_) => e[i] = -p[n + i],
                Model::Left => e[n + i] = -p[i],
                Model::Intermediate => {
                    e[i] = p[n + i] * 2.0;
                    e[n + i] = p[i] * -2.0;
                }
            }
        }
        e
    }

    /// `dη(∂x_i, ∂y_i)` of the undeformed form.
    fn omega0(&self) -> f64 {
        match self.model {
            Model::Right | Model::Deformed(_) => 1.0,
            Model::Left => -1.0,
            Model::Intermediate => -4.0,
        }
    }

    /// `f_a = 1 / (1 + Σ a_i (x_i² + y_i²))`.
    pub fn conformal_factor<S: Scalar>(&self, p: &[S]) -> S {
        match self.weights() {
            None => S::one(),
            Some(a) => {
                let n = self.n;
                let mut den = S::one();
                for i in 0..n {
                    den = den + (p[i] * p[i] + p[n + i] * p[n + i]) * a[i];
                }
                S::one() / den
            }
        }
    }

    /// Exact Reeb field (for the deformed model the weights are converted
    /// to rationals exactly).
    pub fn xi_field(&self) -> PolyVectorField {
        let n = self.n;
        let mut xi = PolyVectorField::coord(n, 2 * n);
        if let Some(a) = self.weights() {
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                let c = BigRational::from_f64(ai).expect("finite weight");
                let xii = crate::cr_algebra::x_field(n, i, i);
                xi = xi.add(&xii.scale(&c)).expect("same dimension");
            }
        }
        xi
    }

    /// Exact contact form for the polynomial models.
    pub fn eta_form(&self) -> Option<PolyOneForm> {
        match self.model {
            Model::Right => Some(PolyOneForm::eta_right(self.n)),
            Model::Left => Some(PolyOneForm::eta_left(self.n)),
            Model::Intermediate => Some(PolyOneForm::eta_intermediate(self.n)),
            Model::Deformed(_) => None,
        }
    }
}

/// Right-model horizontal frame `V_i = ∂x_i + y_i∂z`, `U_i = ∂y_i`.
pub fn right_frame(n: usize, i: usize) -> (PolyVectorField, PolyVectorField) {
    let d = 2 * n + 1;
    let v = PolyVectorField::from_pairs(n, vec![(i, Poly::one(d)), (2 * n, Poly::var(d, n + i))]);
    let u = PolyVectorField::coord(n, n + i);
    (v, u)
}

impl ContactMetric for SasakiStructure {
    fn n(&self) -> usize {
        self.n
    }

    fn xi<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.n;
        let mut v = vec![S::zero(); 2 * n + 1];
        v[2 * n] = S::one();
        if let Some(a) = self.weights() {
            for i in 0..n {
                let (x, y) = (p[i], p[n + i]);
                v[i] = v[i] + y * (-2.0 * a[i]);
                v[n + i] = v[n + i] + x * (2.0 * a[i]);
                v[2 * n] = v[2 * n] + (x * x - y * y) * a[i];
            }
        }
        v
    }

    fn eta<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let e = self.eta0(p);
        match self.weights() {
            None => e,
            Some(_) => {
                let f = self.conformal_factor(p);
                e.into_iter().map(|c| c * f).collect()
            }
        }
    }

    fn d_eta<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        let n = self.n;
        let d = 2 * n + 1;
        let w = self.omega0();
        let mut om = vec![vec![S::zero(); d]; d];
        for i in 0..n {
            om[i][n + i] = S::constant(w);
            om[n + i][i] = S::constant(-w);
        }
        if let Some(a) = self.weights() {
            // d(fη) = df∧η + f dη, ∂_{x_i} f = −2 a_i x_i f²
            let f = self.conformal_factor(p);
            let e = self.eta0(p);
            let mut df = vec![S::zero(); d];
            for i in 0..n {
                df[i] = p[i] * f * f * (-2.0 * a[i]);
                df[n + i] = p[n + i] * f * f * (-2.0 * a[i]);
            }
            for r in 0..d {
                for c in 0..d {
                    om[r][c] = om[r][c] * f + df[r] * e[c] - df[c] * e[r];
                }
            }
        }
        om
    }

    fn phi<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        let n = self.n;
        let d = 2 * n + 1;
        let s = self.j_sign();
        let e = self.eta0(p);
        let mut ph = vec![vec![S::zero(); d]; d];
        for i in 0..n {
            // Φ = H∘J∘π with H(w) = w − η(w)∂z
            ph[n + i][i] = S::constant(s);
            ph[2 * n][i] = e[n + i] * (-s);
            ph[i][n + i] = S::constant(-s);
            ph[2 * n][n + i] = e[i] * s;
        }
        if self.weights().is_some() {
            // Φ_a = Φ − (Φξ_a)⊗η_a
            let xi = self.xi(p);
            let eta = self.eta(p);
            let phi_xi: Vec<S> = (0..d)
                .map(|r| (0..d).fold(S::zero(), |acc, c| acc + ph[r][c] * xi[c]))
                .collect();
            for r in 0..d {
                for c in 0..d {
                    ph[r][c] = ph[r][c] - phi_xi[r] * eta[c];
                }
            }
        }
        ph
    }
}

/// Adapter exposing the metric of a [`ContactMetric`] as a [`MetricField`].
pub struct MetricOf<'a, T: ?Sized>(pub &'a T);
/// Adapter exposing `η` as a [`OneFormField`].
pub struct EtaOf<'a, T: ?Sized>(pub &'a T);
/// Adapter exposing `ξ` as a [`VectorField`].
pub struct XiOf<'a, T: ?Sized>(pub &'a T);

impl<T: ContactMetric> MetricField for MetricOf<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        self.0.metric(p)
    }
}

impl<T: ContactMetric> OneFormField for EtaOf<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.0.eta(p)
    }
}

impl<T: ContactMetric> VectorField for XiOf<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.0.xi(p)
    }
}

/// The structure with `Φ` replaced by `−Φ` and everything else kept.
/// Negative control: the metric no longer follows from the recipe.
pub struct NegatedPhi<'a, T>(pub &'a T);

impl<T: ContactMetric> ContactMetric for NegatedPhi<'_, T> {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn xi<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.0.xi(p)
    }
    fn eta<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.0.eta(p)
    }
    fn d_eta<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        self.0.d_eta(p)
    }
    fn phi<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        self.0
            .phi(p)
            .into_iter()
            .map(|r| r.into_iter().map(|v| -v).collect())
            .collect()
    }
    fn metric<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        self.0.metric(p)
    }
}

fn pfaffian(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    if k == 0 {
        return 1.0;
    }
    if k % 2 == 1 {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in 1..k {
        if m[0][j] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..k).filter(|&c| c != j).collect();
        let minor: Vec<Vec<f64>> = keep
            .iter()
            .map(|&r| keep.iter().map(|&c| m[r][c]).collect())
            .collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * m[0][j] * pfaffian(&minor);
    }
    acc
}

/// Coefficient of `η∧(dη)^n` against `dz∧dx_1∧dy_1∧…∧dx_n∧dy_n` at `p`.
pub fn contact_volume<W: OneFormField>(eta: &W, n: usize, p: &[f64]) -> Result<f64> {
    check_dim(2 * n + 1, eta.dim())?;
    check_dim(2 * n + 1, p.len())?;
    let e = eta.components(p);
    let om = exterior_derivative(eta, p)?;
    let mut order = vec![2 * n];
    for i in 0..n {
        order.push(i);
        order.push(n + i);
    }
    let nfact: f64 = (1..=n).map(|k| k as f64).product();
    let mut acc = 0.0;
    for (pos, &k) in order.iter().enumerate() {
        if e[k] == 0.0 {
            continue;
        }
        let rest: Vec<usize> = order.iter().copied().filter(|&c| c != k).collect();
        let sub: Vec<Vec<f64>> = rest
            .iter()
            .map(|&r| rest.iter().map(|&c| om[r][c]).collect())
            .collect();
        let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * e[k] * nfact * pfaffian(&sub);
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("contact volume".into()));
    }
    Ok(acc)
}
