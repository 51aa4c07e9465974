//! The Sasaki cone of the standard CR structure and the deformed Sasakian
//! structures `S_{1,a}`.
//!
//! Convention: `ξ_a = ξ + Σ a_i X_ii` with `a_i ≥ 0`. Since
//! `η(X_ii) = x_i² + y_i²`, this gives `η_a = f_a η` with
//! `f_a = 1/(1 + Σ a_i(x_i² + y_i²))`, the blocks `(x_i, y_i)` rotate at
//! angular rate `2a_i` along the Reeb flow, and the moment map components
//! are `h_i = η_a(X_ii) = (x_i² + y_i²) f_a ≥ 0`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::heisenberg::{ContactMetric, Model, SasakiStructure};
use crate::ode::{integrate_at, OdeOptions};
use crate::tensor::forms::MetricField;
use crate::tensor::jet::Scalar;
use crate::tensor::{curvature, CurvatureReport};

/// Coordinates `(a0, b)` of `a0·ξ + Σ b_i X_ii`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeElement {
    pub a0: f64,
    pub b: Vec<f64>,
}

/// Deformation weights `a_i ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeParams {
    a: Vec<f64>,
}

impl ConeParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter("weights must have length n ≥ 1".into()));
        }
        if let Some(bad) = a.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "deformation weights must be finite and non-negative, got {}",
                bad
            )));
        }
        Ok(ConeParams { a })
    }

    pub fn zero(n: usize) -> Self {
        ConeParams { a: vec![0.0; n] }
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `|a| = Σ a_i`.
    pub fn norm1(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|v| *v == 0.0)
    }

    /// Weyl-reduced form `0 ≤ a_1 ≤ … ≤ a_n`.
    pub fn canonical(&self) -> ConeParams {
        let mut a = self.a.clone();
        a.sort_by(|x, y| x.partial_cmp(y).expect("finite weights"));
        ConeParams { a }
    }

    pub fn is_canonical(&self) -> bool {
        self.a.windows(2).all(|w| w[0] <= w[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentValue {
    pub h: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Positivity {
    pub positive: bool,
    /// A radius `r` in some block at which `η(ξ') ≤ 0`, when not positive.
    pub witness_radius: Option<f64>,
    pub witness_block: Option<usize>,
}

/// `η(a0ξ + Σ b_i X_ii) = a0 + Σ b_i (x_i² + y_i²)` at `p`.
pub fn reeb_pairing(e: &ConeElement, p: &[f64]) -> f64 {
    let n = e.b.len();
    e.a0 + (0..n)
        .map(|i| e.b[i] * (p[i] * p[i] + p[n + i] * p[n + i]))
        .sum::<f64>()
}

/// Whether `η(a0ξ + Σ b_i X_ii) > 0` on all of ℍ^{2n+1}: iff `a0 > 0` and
/// every `b_i ≥ 0`.
pub fn positivity(e: &ConeElement, n: usize) -> Result<Positivity> {
    check_dim(n, e.b.len())?;
    if !(e.a0 > 0.0) {
        return Ok(Positivity {
            positive: false,
            witness_radius: Some(0.0),
            witness_block: None,
        });
    }
    // most negative weight gives the smallest failing radius
    let worst = e
        .b
        .iter()
        .enumerate()
        .filter(|(_, b)| **b < 0.0)
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap());
    Ok(match worst {
        None => Positivity {
            positive: true,
            witness_radius: None,
            witness_block: None,
        },
        Some((i, b)) => Positivity {
            positive: false,
            witness_radius: Some((e.a0 / -b).sqrt()),
            witness_block: Some(i),
        },
    })
}

/// Dilation and Weyl reduction: `a_i = b_i / a0`, sorted ascending.
pub fn reduce(e: &ConeElement) -> Result<ConeParams> {
    let v = positivity(e, e.b.len())?;
    if !v.positive {
        return Err(Error::NotPositive(format!("a0 = {}, b = {:?}", e.a0, e.b)));
    }
    Ok(ConeParams::new(e.b.iter().map(|b| b / e.a0).collect())?.canonical())
}

/// The deformed structure `S_{1,a}`.
pub fn deform(a: &ConeParams, n: usize) -> Result<SasakiStructure> {
    check_dim(n, a.n())?;
    SasakiStructure::new(Model::Deformed(a.clone()), n)
}

/// Closed-form Reeb flow of `ξ_a` from `p0` for time `t`.
pub fn reeb_flow_closed(a: &ConeParams, p0: &[f64], t: f64) -> Result<Vec<f64>> {
    let n = a.n();
    check_dim(2 * n + 1, p0.len())?;
    let mut out = p0.to_vec();
    let mut z = p0[2 * n] + t;
    for i in 0..n {
        let (x0, y0) = (p0[i], p0[n + i]);
        let th = 2.0 * a.a[i] * t;
        let (s, c) = th.sin_cos();
        out[i] = x0 * c - y0 * s;
        out[n + i] = x0 * s + y0 * c;
        let s2 = (2.0 * th).sin();
        z += (x0 * x0 - y0 * y0) / 4.0 * s2 - x0 * y0 * s * s;
    }
    out[2 * n] = z;
    Ok(out)
}

/// Reeb flow of `ξ_a` by the adaptive integrator, at each of `times`.
pub fn reeb_flow_numeric(a: &ConeParams, p0: &[f64], times: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>> {
    let s = deform(a, a.n())?;
    check_dim(s.dim(), p0.len())?;
    integrate_at(
        |_, y, dy| {
            let v = s.xi(y);
            dy.copy_from_slice(&v);
        },
        0.0,
        p0,
        times,
        opts,
    )
}

/// `h_i = (x_i² + y_i²) f_a`.
pub fn moment_map(a: &ConeParams, p: &[f64]) -> Result<MomentValue> {
    let n = a.n();
    check_dim(2 * n + 1, p.len())?;
    let r2: Vec<f64> = (0..n).map(|i| p[i] * p[i] + p[n + i] * p[n + i]).collect();
    let f = 1.0 / (1.0 + a.a.iter().zip(&r2).map(|(a, r)| a * r).sum::<f64>());
    Ok(MomentValue {
        h: r2.into_iter().map(|r| r * f).collect(),
    })
}

/// Scalar curvature of `g_a` at `p` from the curvature engine.
pub fn engine_scalar(a: &ConeParams, p: &[f64]) -> Result<f64> {
    let s = deform(a, a.n())?;
    Ok(curvature(&s.metric_field(), p)?.scalar)
}

/// The closed form as printed in the literature, in this crate's moment
/// convention: `2n(4|a| − 1) − n(2n+7) Σ a_j² h_j`. Reported side by side
/// with the calibrated constants; it agrees with the engine only at `a = 0`.
pub fn printed_scalar(a: &ConeParams, p: &[f64]) -> Result<f64> {
    let n = a.n() as f64;
    let h = moment_map(a, p)?.h;
    let quad: f64 = a.a.iter().zip(&h).map(|(ai, hi)| ai * ai * hi).sum();
    Ok(2.0 * n * (4.0 * a.norm1() - 1.0) - n * (2.0 * n + 7.0) * quad)
}

/// Least-squares affine fit `s ≈ c0 + Σ c_i h_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub n: usize,
    pub a: Vec<f64>,
    pub c0: f64,
    pub c: Vec<f64>,
    /// max-abs fit residual over the samples
    pub residual: f64,
    pub samples: usize,
}

impl Calibration {
    pub fn predict(&self, h: &[f64]) -> f64 {
        self.c0 + self.c.iter().zip(h).map(|(c, h)| c * h).sum::<f64>()
    }
}

/// Fit `s = c0 + Σ c_i h_i` to paired samples.
pub fn fit_affine(h: &[Vec<f64>], s: &[f64]) -> Result<(f64, Vec<f64>, f64)> {
    let m = s.len();
    check_dim(m, h.len())?;
    let n = h.first().map(|r| r.len()).unwrap_or(0);
    if m < n + 2 {
        return Err(Error::DegenerateDesign(format!(
            "need at least {} samples, got {}",
            n + 2,
            m
        )));
    }
    let k = n + 1;
    let x = DMatrix::from_fn(m, k, |r, c| if c == 0 { 1.0 } else { h[r][c - 1] });
    let y = DVector::from_column_slice(s);
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::DegenerateDesign(format!(
            "moment samples do not separate the affine coefficients (σ_min/σ_max = {:e})",
            smin / smax
        )));
    }
    let beta = svd
        .solve(&y, 1e-14 * smax)
        .map_err(|e| Error::DegenerateDesign(e.to_string()))?;
    let fit = &x * &beta;
    let residual = (fit - &y).amax();
    Ok((beta[0], beta.iter().skip(1).cloned().collect(), residual))
}

fn scalars_par<G: MetricField + Sync>(g: &G, samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    samples
        .par_iter()
        .map(|p| curvature(g, p).map(|r| r.scalar))
        .collect()
}

/// Calibrate the affine dependence of the engine scalar curvature of `g_a`
/// on the moment map over `samples`.
pub fn calibrate_constants(a: &ConeParams, n: usize, samples: &[Vec<f64>]) -> Result<Calibration> {
    let s = deform(a, n)?;
    calibrate_metric(&s.metric_field(), a, samples)
}

/// Same as [`calibrate_constants`] for an arbitrary metric, paired with the
/// moment map of `a` (used for negative controls).
pub fn calibrate_metric<G: MetricField + Sync>(g: &G, a: &ConeParams, samples: &[Vec<f64>]) -> Result<Calibration> {
    let sc = scalars_par(g, samples)?;
    let h: Vec<Vec<f64>> = samples
        .iter()
        .map(|p| moment_map(a, p).map(|m| m.h))
        .collect::<Result<_>>()?;
    let (c0, c, residual) = fit_affine(&h, &sc)?;
    Ok(Calibration {
        n: a.n(),
        a: a.a.clone(),
        c0,
        c,
        residual,
        samples: samples.len(),
    })
}

/// `c0 + Σ c_i h_i(p)` from a calibration; `a = 0` returns `−2n` exactly.
pub fn scalar_closed_form(cal: &Calibration, p: &[f64]) -> Result<f64> {
    let a = ConeParams::new(cal.a.clone())?;
    if a.is_zero() {
        return Ok(-2.0 * cal.n as f64);
    }
    Ok(cal.predict(&moment_map(&a, p)?.h))
}

/// Like [`calibrate_constants`] but errors when the affine fit residual
/// exceeds `tol` (a break in the convention chain).
pub fn calibrate_checked(a: &ConeParams, n: usize, samples: &[Vec<f64>], tol: f64) -> Result<Calibration> {
    let cal = calibrate_constants(a, n, samples)?;
    if cal.residual > tol {
        return Err(Error::CalibrationResidual {
            residual: cal.residual,
            tolerance: tol,
        });
    }
    Ok(cal)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalityReport {
    pub affine_residual: f64,
    /// sample variance of the scalar curvature
    pub scalar_variance: f64,
    pub calibration: Calibration,
}

pub fn extremality_report(a: &ConeParams, n: usize, samples: &[Vec<f64>]) -> Result<ExtremalityReport> {
    let s = deform(a, n)?;
    let g = s.metric_field();
    let sc = scalars_par(&g, samples)?;
    let h: Vec<Vec<f64>> = samples
        .iter()
        .map(|p| moment_map(a, p).map(|m| m.h))
        .collect::<Result<_>>()?;
    let (c0, c, residual) = fit_affine(&h, &sc)?;
    let m = sc.len() as f64;
    let mean = sc.iter().sum::<f64>() / m;
    let var = sc.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    Ok(ExtremalityReport {
        affine_residual: residual,
        scalar_variance: var,
        calibration: Calibration {
            n,
            a: a.a.clone(),
            c0,
            c,
            residual,
            samples: samples.len(),
        },
    })
}

/// Projection of `v` onto `ker η` along `ξ` for the structure `s`.
fn project_horizontal<T: ContactMetric>(s: &T, p: &[f64], v: &[f64]) -> Vec<f64> {
    let eta = s.eta(p);
    let xi = s.xi(p);
    let e: f64 = v.iter().zip(&eta).map(|(a, b)| a * b).sum();
    v.iter().zip(&xi).map(|(a, b)| a - e * b).collect()
}

fn apply_phi<T: ContactMetric>(s: &T, p: &[f64], v: &[f64]) -> Vec<f64> {
    s.phi(p)
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `K(u, Φu)` for the horizontal vector `u` (projected into `ker η`).
pub fn phi_sectional_of<T: ContactMetric>(s: &T, rep: &CurvatureReport, p: &[f64], u: &[f64]) -> Result<f64> {
    let u = project_horizontal(s, p, u);
    let v = apply_phi(s, p, &u);
    rep.sectional(&u, &v)
}

/// Φ-sectional curvature of `g_a` on the plane of `V_i = ∂x_i + y_i∂z`.
pub fn phi_sectional(a: &ConeParams, p: &[f64], i: usize) -> Result<f64> {
    let n = a.n();
    if i >= n {
        return Err(Error::InvalidParameter(format!("block index {} ≥ n = {}", i, n)));
    }
    let s = deform(a, n)?;
    let rep = curvature(&s.metric_field(), p)?;
    let mut v = vec![0.0; 2 * n + 1];
    v[i] = 1.0;
    v[2 * n] = p[n + i];
    phi_sectional_of(&s, &rep, p, &v)
}

/// `‖Ric + 2g − (2n+2) η⊗η‖∞`, zero for a null eta-Einstein structure.
pub fn eta_einstein_residual<T: ContactMetric>(s: &T, rep: &CurvatureReport, p: &[f64]) -> f64 {
    let n = s.n() as f64;
    let eta = s.eta(p);
    let d = eta.len();
    let mut m: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let v = rep.ricci[i][j] + 2.0 * rep.metric[i][j] - (2.0 * n + 2.0) * eta[i] * eta[j];
            m = m.max(v.abs());
        }
    }
    m
}

/// `g_a + ε dz²`: no longer Sasakian, used as a negative control.
pub struct PerturbedMetric<'a> {
    pub base: &'a SasakiStructure,
    pub eps: f64,
}

impl MetricField for PerturbedMetric<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        let mut g = self.base.metric(p);
        let k = g.len() - 1;
        g[k][k] = g[k][k] + self.eps;
        g
    }
}
