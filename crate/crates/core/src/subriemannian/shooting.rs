//! Normal geodesics by shooting.
//!
//! Hamiltonian `H = ½Σ[(p_{x_i} + y_i p_z)² + p_{y_i}²] + p_z²/(2L)` (the
//! last term absent in CC mode). For finite `L` this is the cometric of
//! `g_L`, so its projections are the Levi-Civita geodesics of `g_L`.
//! Geodesics run on `[0, 1]`, so the length is `√(2H)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{relative, DistanceEstimate, DistanceMethod, DistanceMode};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::sampling::rng;

#[derive(Clone, Debug)]
pub struct ShootingOptions {
    pub max_iter: usize,
    /// sup-norm endpoint tolerance
    pub tol: f64,
    pub random_seeds: usize,
    pub seed: u64,
    pub ode: OdeOptions,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            max_iter: 200,
            tol: 1e-10,
            random_seeds: 6,
            seed: 0,
            ode: OdeOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Geodesic {
    /// initial covector at the origin
    pub covector: Vec<f64>,
    pub endpoint: Vec<f64>,
    pub length: f64,
    pub residual: f64,
}

fn rhs(n: usize, inv_l: f64, s: &[f64], ds: &mut [f64]) {
    let d = 2 * n + 1;
    let (x, p) = s.split_at(d);
    let pz = p[2 * n];
    let mut zdot = pz * inv_l;
    for i in 0..n {
        let a = p[i] + x[n + i] * pz;
        let b = p[n + i];
        ds[i] = a;
        ds[n + i] = b;
        zdot += a * x[n + i];
        ds[d + i] = 0.0;
        ds[d + n + i] = -a * pz;
    }
    ds[2 * n] = zdot;
    ds[d + 2 * n] = 0.0;
}

/// Time-one point of the geodesic from `p0` with initial covector `covector`.
pub fn geodesic_endpoint(n: usize, p0: &[f64], covector: &[f64], inv_l: f64, opts: OdeOptions) -> Result<Vec<f64>> {
    let mut s = p0.to_vec();
    s.extend_from_slice(covector);
    let out = integrate(|_, y, dy| rhs(n, inv_l, y, dy), 0.0, &s, 1.0, opts)?;
    Ok(out[..2 * n + 1].to_vec())
}

fn hamiltonian_length(n: usize, c: &[f64], inv_l: f64) -> f64 {
    // at the origin y = 0
    let h2: f64 = c[..2 * n].iter().map(|v| v * v).sum::<f64>() + c[2 * n] * c[2 * n] * inv_l;
    h2.sqrt()
}

fn residual(n: usize, c: &[f64], target: &[f64], inv_l: f64, opts: OdeOptions) -> Result<Vec<f64>> {
    let o = vec![0.0; 2 * n + 1];
    let e = geodesic_endpoint(n, &o, c, inv_l, opts)?;
    Ok(e.iter().zip(target).map(|(a, b)| a - b).collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Levenberg–Marquardt on the endpoint map from one initial covector.
fn refine(n: usize, c0: Vec<f64>, target: &[f64], inv_l: f64, opts: &ShootingOptions) -> Result<Geodesic> {
    let d = 2 * n + 1;
    let mut c = c0;
    let mut f = residual(n, &c, target, inv_l, opts.ode)?;
    let mut cost: f64 = f.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    let scale = 1.0 + sup(target);
    for _ in 0..opts.max_iter {
        if sup(&f) < opts.tol * scale {
            break;
        }
        let mut jac = DMatrix::zeros(d, d);
        for k in 0..d {
            let hk = 1e-6 * (1.0 + c[k].abs());
            let mut cp = c.clone();
            cp[k] += hk;
            let fp = residual(n, &cp, target, inv_l, opts.ode)?;
            cp[k] -= 2.0 * hk;
            let fm = residual(n, &cp, target, inv_l, opts.ode)?;
            for r in 0..d {
                jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * hk);
            }
        }
        let fv = DVector::from_column_slice(&f);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &fv;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..d {
                a[(k, k)] += mu * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let cn: Vec<f64> = c.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if let Ok(fn_) = residual(n, &cn, target, inv_l, opts.ode) {
                let cn_cost: f64 = fn_.iter().map(|v| v * v).sum();
                if cn_cost.is_finite() && cn_cost < cost {
                    c = cn;
                    f = fn_;
                    cost = cn_cost;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let endpoint: Vec<f64> = f.iter().zip(target).map(|(a, b)| a + b).collect();
    Ok(Geodesic {
        length: hamiltonian_length(n, &c, inv_l),
        residual: sup(&f),
        covector: c,
        endpoint,
    })
}

fn seeds(n: usize, r: &[f64], inv_l: f64, opts: &ShootingOptions) -> Vec<Vec<f64>> {
    let d = 2 * n + 1;
    let chord2: f64 = r[..2 * n].iter().map(|v| v * v).sum();
    let xy: f64 = (0..n).map(|i| r[i] * r[n + i]).sum();
    let w = r[2 * n] - xy / 2.0;
    let loop_len = 2.0 * (PI * w.abs()).sqrt();
    let mut out = Vec::new();
    let lambdas = [0.0, PI / 2.0, PI, 1.5 * PI, 1.9 * PI, 2.0 * PI];
    for &lam0 in &lambdas {
        for sign in [1.0, -1.0] {
            let lam = lam0 * sign;
            if lam0 == 0.0 && sign < 0.0 {
                continue;
            }
            let mut c = vec![0.0; d];
            c[2 * n] = lam;
            if chord2 > 1e-20 && (lam0 - 2.0 * PI).abs() > 1e-12 {
                // c = Δ·iλ/(1 − e^{−iλ}) blockwise
                let (fr, fi) = if lam == 0.0 {
                    (1.0, 0.0)
                } else {
                    let (dr, di) = (1.0 - lam.cos(), lam.sin());
                    let den = dr * dr + di * di;
                    // iλ/(dr + i di)
                    (lam * di / den, lam * dr / den)
                };
                for i in 0..n {
                    let (xr, xi) = (r[i], r[n + i]);
                    c[i] = xr * fr - xi * fi;
                    c[n + i] = xr * fi + xi * fr;
                }
            } else if lam0 != 0.0 {
                c[0] = loop_len.max(1e-3);
            }
            out.push(c);
        }
    }
    if inv_l > 0.0 {
        let mut c = vec![0.0; d];
        c[..2 * n].copy_from_slice(&r[..2 * n]);
        c[2 * n] = w / inv_l;
        out.push(c);
    }
    let mut g = rng(opts.seed);
    let mag = chord2.sqrt() + loop_len + 0.1;
    for _ in 0..opts.random_seeds {
        let mut c: Vec<f64> = (0..d).map(|_| g.gen_range(-1.0..1.0) * mag).collect();
        c[2 * n] = g.gen_range(-2.0 * PI..2.0 * PI);
        out.push(c);
    }
    out
}

/// Shortest converged geodesic from the origin to `target` over all seeds.
pub fn shoot(n: usize, target: &[f64], mode: DistanceMode, opts: &ShootingOptions) -> Result<Geodesic> {
    mode.check()?;
    let inv_l = mode.inv_l();
    let cands: Vec<Result<Geodesic>> = seeds(n, target, inv_l, opts)
        .into_par_iter()
        .map(|c| refine(n, c, target, inv_l, opts))
        .collect();
    let scale = 1.0 + sup(target);
    let mut best: Option<Geodesic> = None;
    let mut best_res = f64::INFINITY;
    for g in cands.into_iter().flatten() {
        best_res = best_res.min(g.residual);
        if g.residual < opts.tol * scale && best.as_ref().map_or(true, |b| g.length < b.length) {
            best = Some(g);
        }
    }
    best.ok_or(Error::ShootingDiverged { residual: best_res })
}

pub fn dist_shooting(p: &[f64], q: &[f64], mode: DistanceMode, opts: &ShootingOptions) -> Result<DistanceEstimate> {
    let r = relative(p, q)?;
    let n = r.len() / 2;
    if r.iter().all(|v| *v == 0.0) {
        return Ok(DistanceEstimate {
            value: 0.0,
            method: DistanceMethod::Shooting,
            bracket: None,
            fallback: false,
        });
    }
    let g = shoot(n, &r, mode, opts)?;
    Ok(DistanceEstimate {
        value: g.length,
        method: DistanceMethod::Shooting,
        bracket: None,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subriemannian::{cc_distance_closed, PenalizedMetric};
    use crate::tensor::curvature;

    #[test]
    fn straight_and_loop() {
        let o = ShootingOptions::default();
        let d = dist_shooting(&[0.0; 3], &[1.0, 0.0, 0.0], DistanceMode::Cc, &o).unwrap();
        assert!((d.value - 1.0).abs() < 1e-8);
        let d = dist_shooting(&[0.0; 3], &[0.0, 0.0, 1.0], DistanceMode::Cc, &o).unwrap();
        assert!((d.value - 2.0 * PI.sqrt()).abs() < 1e-6, "{}", d.value);
    }

    #[test]
    fn matches_closed_form_n2() {
        let o = ShootingOptions::default();
        let p = [0.1, -0.2, 0.3, 0.0, 0.2];
        let q = [0.5, 0.1, -0.2, 0.4, -0.3];
        let s = dist_shooting(&p, &q, DistanceMode::Cc, &o).unwrap().value;
        let c = cc_distance_closed(&p, &q).unwrap();
        assert!((s - c).abs() < 1e-6, "{} {}", s, c);
    }

    #[test]
    fn vertical_penalized() {
        let o = ShootingOptions::default();
        let d = dist_shooting(&[0.0; 3], &[0.0, 0.0, 1.0], DistanceMode::Riemannian(1.0), &o).unwrap();
        assert!(d.value <= 1.0 + 1e-9);
    }

    #[test]
    fn hamiltonian_flow_solves_levi_civita_geodesic_equation() {
        let l = 3.0;
        let n = 1;
        let g = PenalizedMetric::new(n, l).unwrap();
        let mut s = vec![0.2, -0.4, 0.1, 0.7, 0.3, -1.1];
        let dt = 1e-4;
        let opts = OdeOptions::default();
        let step = |s: &[f64], t: f64| integrate(|_, y, dy| rhs(n, 1.0 / l, y, dy), 0.0, s, t, opts).unwrap();
        for _ in 0..3 {
            let sp = step(&s, dt);
            let sm = step(&s, -dt);
            let mut v = vec![0.0; 6];
            rhs(n, 1.0 / l, &s, &mut v);
            let acc: Vec<f64> = (0..3).map(|k| (sp[k] - 2.0 * s[k] + sm[k]) / (dt * dt)).collect();
            let rep = curvature(&g, &s[..3]).unwrap();
            for k in 0..3 {
                let mut gv = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        gv += rep.gamma(k, i, j) * v[i] * v[j];
                    }
                }
                assert!((acc[k] + gv).abs() < 1e-5, "{} {}", acc[k], -gv);
            }
            s = step(&s, 0.3);
        }
    }
}
