//! Invariant suites aggregated by `heiscr verify`.

use std::f64::consts::PI;

use heiscr_core::cr_algebra::{self, bracket_table, cr_residual, hamiltonian, hamiltonian_field, verify_ideal};
use heiscr_core::heisenberg::{
    contact_volume, orientation_check, pullback_residuals, ContactMetric, Dilation, Involution,
    LeftTranslation, Model, Point, RightTranslation, SasakiStructure, Sigma, UnitaryMap,
};
use heiscr_core::ode::OdeOptions;
use heiscr_core::quotients::{
    deck_to_int, homology, in_fundamental_box, invariance_residual, projected_lattice, rational_point,
    reduce_point, LatticeSpec,
};
use heiscr_core::sampling::{ball_points, gaussian_vector, rng};
use heiscr_core::sasaki_cone::{
    calibrate_constants, engine_scalar, eta_einstein_residual, extremality_report, phi_sectional_of,
    positivity, reduce, reeb_flow_closed, reeb_flow_numeric, reeb_pairing, scalar_closed_form,
    ConeElement,
};
use heiscr_core::subriemannian::{
    bracket_rank, cc_distance_closed, convergence_table, dist_graph, dist_shooting, homogeneity_check,
    horizontal_rank, lift, DistanceMode, ShootingOptions,
};
use heiscr_core::tensor::{christoffel_fd, curvature, killing_residual, sectional, Euclidean, PolyVectorField, Poly};
use heiscr_core::{ConeParams, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{Provenance::*, Record};

pub type SuiteFn = fn(&RunConfig) -> Vec<Record>;

pub const SUITES: &[(&str, SuiteFn)] = &[
    ("tensor", tensor),
    ("heisenberg", heisenberg),
    ("cr_algebra", cr_algebra_suite),
    ("sasaki_cone", sasaki_cone),
    ("subriemannian", subriemannian),
    ("quotients", quotients),
];

/// Runs every suite on the worker pool; records keep suite order.
pub fn run_all(cfg: &RunConfig) -> Vec<Record> {
    SUITES
        .par_iter()
        .map(|(name, f)| {
            f(cfg)
                .into_iter()
                .map(|mut r| {
                    r.id = format!("{}.{}", name, r.id);
                    r
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Turns a fallible check into a failing record on error.
pub fn guard(id: &str, inputs: Value, f: impl FnOnce() -> Result<Record>) -> Record {
    match f() {
        Ok(r) => r,
        Err(e) => Record::error(id, inputs, e.to_string(), Computed),
    }
}

/// NaN-propagating maximum of `f` over `pts`.
pub fn max_over<F>(pts: &[Vec<f64>], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = pts.par_iter().map(|p| f(p)).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, |m, v| if v.is_nan() || v > m { v } else { m }))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| {
        let d = (x - y).abs();
        if d.is_nan() || d > m {
            d
        } else {
            m
        }
    })
}

fn unit(d: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[k] = 1.0;
    v
}

fn structures(cfg: &RunConfig) -> Result<Vec<SasakiStructure>> {
    let n = cfg.n;
    let a = if cfg.cone().is_zero() {
        ConeParams::new((1..=n).map(|i| 0.5 * i as f64).collect())?
    } else {
        cfg.cone()
    };
    Ok(vec![
        SasakiStructure::right(n)?,
        SasakiStructure::left(n)?,
        SasakiStructure::intermediate(n)?,
        SasakiStructure::new(Model::Deformed(a), n)?,
    ])
}

fn tensor(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n;
    let d = 2 * n + 1;
    let pts = ball_points(n, cfg.samples, 2.0, cfg.seed);
    let inp = json!({ "n": n, "samples": pts.len() });
    let flat = Euclidean { dim: d };
    let mut out = vec![
        guard("flat_scalar", inp.clone(), || {
            let m = max_over(&pts, |p| Ok(curvature(&flat, p)?.scalar.abs()))?;
            Ok(Record::small("flat_scalar", inp.clone(), m, 1e-12, Identity))
        }),
        guard("flat_sectional", inp.clone(), || {
            let m = max_over(&pts, |p| Ok(sectional(&flat, p, &unit(d, 0), &unit(d, d - 1))?.abs()))?;
            Ok(Record::small("flat_sectional", inp.clone(), m, 1e-12, Identity))
        }),
    ];
    let s = match SasakiStructure::right(n) {
        Ok(s) => s,
        Err(e) => return vec![Record::error("right_structure", inp, e.to_string(), Identity)],
    };
    let g = s.metric_field();
    out.push(guard("christoffel_vs_finite_differences", inp.clone(), || {
        let m = max_over(&pts, |p| {
            let rep = curvature(&g, p)?;
            let fd = christoffel_fd(&g, p, 1e-5)?;
            let mut worst: f64 = 0.0;
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        worst = worst.max((rep.gamma(k, i, j) - fd[k][i][j]).abs());
                    }
                }
            }
            Ok(worst)
        })?;
        Ok(Record::small("christoffel_vs_finite_differences", inp.clone(), m, 1e-6, Computed))
    }));
    out.push(guard("bianchi", inp.clone(), || {
        let m = max_over(&pts, |p| Ok(curvature(&g, p)?.bianchi_residual))?;
        Ok(Record::small("bianchi", inp.clone(), m, 1e-9, Identity))
    }));
    out.push(guard("riemann_antisymmetry", inp.clone(), || {
        let m = max_over(&pts, |p| Ok(curvature(&g, p)?.antisymmetry_residual()))?;
        Ok(Record::small("riemann_antisymmetry", inp.clone(), m, 1e-9, Identity))
    }));
    out.push(guard("ricci_symmetry", inp.clone(), || {
        let m = max_over(&pts, |p| {
            let r = curvature(&g, p)?.ricci;
            Ok((0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .fold(0.0f64, |m, (i, j)| m.max((r[i][j] - r[j][i]).abs())))
        })?;
        Ok(Record::small("ricci_symmetry", inp.clone(), m, 1e-9, Identity))
    }));
    out
}

fn heisenberg(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n;
    let d = 2 * n + 1;
    let mut r = rng(cfg.seed.wrapping_add(1));
    let triples: Vec<[Point<f64>; 3]> = (0..cfg.samples)
        .map(|_| {
            let mut pt = || Point::from_flat(&gaussian_vector(&mut r, d)).expect("dimension");
            [pt(), pt(), pt()]
        })
        .collect();
    let inp = json!({ "n": n, "samples": triples.len() });
    let flat = |p: &Point<f64>| p.to_flat();
    let mut out = vec![];

    let group_check = |id: &str, f: &dyn Fn(&[Point<f64>; 3]) -> Result<f64>, tol: f64| {
        guard(id, inp.clone(), || {
            let mut m: f64 = 0.0;
            for t in &triples {
                m = m.max(f(t)?);
            }
            Ok(Record::small(id, inp.clone(), m, tol, Identity))
        })
    };
    out.push(group_check(
        "associativity",
        &|[p, q, s]| Ok(sup_diff(&flat(&p.mul(q)?.mul(s)?), &flat(&p.mul(&q.mul(s)?)?))),
        1e-12,
    ));
    out.push(group_check(
        "inverse",
        &|[p, _, _]| Ok(sup_diff(&flat(&p.mul(&p.inv())?), &vec![0.0; d])),
        1e-12,
    ));
    out.push(group_check(
        "dilation_homomorphism",
        &|[p, q, _]| {
            let l = 1.7;
            Ok(sup_diff(&flat(&p.mul(q)?.dilation(&l)?), &flat(&p.dilation(&l)?.mul(&q.dilation(&l)?)?)))
        },
        1e-12,
    ));
    out.push(group_check(
        "commutator_is_central",
        &|[p, q, _]| {
            let c = p.commutator(q)?;
            let sym: f64 = p.x.iter().zip(&q.y).map(|(a, b)| a * b).sum::<f64>()
                - q.x.iter().zip(&p.y).map(|(a, b)| a * b).sum::<f64>();
            let mut want = vec![0.0; d];
            want[d - 1] = sym;
            Ok(sup_diff(&flat(&c), &want))
        },
        1e-12,
    ));

    let pts = ball_points(n, cfg.samples, 2.0, cfg.seed.wrapping_add(2));
    let sts = match structures(cfg) {
        Ok(s) => s,
        Err(e) => {
            out.push(Record::error("structures", inp, e.to_string(), Identity));
            return out;
        }
    };
    for s in &sts {
        let id = format!("structure_residuals.{}", s.model().name());
        out.push(guard(&id, inp.clone(), || {
            let m = max_over(&pts, |p| Ok(s.structure_residuals(p)?.max()))?;
            Ok(Record::small(&id, inp.clone(), m, 1e-9, Identity))
        }));
        let id = format!("reeb_killing.{}", s.model().name());
        out.push(guard(&id, inp.clone(), || {
            let m = max_over(&pts, |p| killing_residual(&s.metric_field(), &s.xi_vector_field(), p))?;
            Ok(Record::small(&id, inp.clone(), m, 1e-9, Identity))
        }));
    }
    let (right, left) = (&sts[0], &sts[1]);
    let hs: Vec<Point<f64>> = triples.iter().map(|t| t[1].clone()).collect();
    out.push(guard("involution_left_to_right", inp.clone(), || {
        let m = max_over(&pts, |p| Ok(pullback_residuals(&Involution(n), left, right, p)?.max()))?;
        Ok(Record::small("involution_left_to_right", inp.clone(), m, 1e-12, Identity))
    }));
    out.push(guard("right_invariance", inp.clone(), || {
        let mut m: f64 = 0.0;
        for (p, h) in pts.iter().zip(&hs) {
            m = m.max(pullback_residuals(&RightTranslation(h.clone()), right, right, p)?.max());
        }
        Ok(Record::small("right_invariance", inp.clone(), m, 1e-12, Identity))
    }));
    out.push(guard("left_invariance", inp.clone(), || {
        let mut m: f64 = 0.0;
        for (p, h) in pts.iter().zip(&hs) {
            m = m.max(pullback_residuals(&LeftTranslation(h.clone()), left, left, p)?.max());
        }
        Ok(Record::small("left_invariance", inp.clone(), m, 1e-12, Identity))
    }));
    out.push(guard("right_model_not_left_invariant", inp.clone(), || {
        let mut m: f64 = 0.0;
        for (p, h) in pts.iter().zip(&hs) {
            m = m.max(pullback_residuals(&LeftTranslation(h.clone()), right, right, p)?.max());
        }
        Ok(Record::at_least("right_model_not_left_invariant", inp.clone(), 1e-6, m, Identity))
    }));
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    out.push(guard("contact_volume", inp.clone(), || {
        let m = max_over(&pts, |p| Ok((contact_volume(&right.eta_field(), n, p)? - fact).abs()))?;
        Ok(Record::small("contact_volume", inp.clone(), m, 1e-10, Identity))
    }));
    out.push(guard("unitary_phase_automorphism", inp.clone(), || {
        let u = UnitaryMap::phase(n, 0, 0.7);
        let m = max_over(&pts, |p| Ok(pullback_residuals(&u, right, right, p)?.max()))?;
        Ok(Record::small("unitary_phase_automorphism", inp.clone(), m, 1e-10, Identity))
    }));
    out.push(guard("sigma_automorphism", inp.clone(), || {
        let m = max_over(&pts, |p| Ok(pullback_residuals(&Sigma { n, i: 0 }, right, right, p)?.max()))?;
        Ok(Record::small("sigma_automorphism", inp.clone(), m, 1e-12, Identity))
    }));
    out.push(guard("dilation_contact_scale", inp.clone(), || {
        let l = 2.0;
        let m = max_over(&pts, |p| {
            let o = orientation_check(&Dilation { n, lambda: l }, n, p)?;
            Ok((o.eta_scale - l * l).abs().max(o.contact_defect))
        })?;
        Ok(Record::small("dilation_contact_scale", inp.clone(), m, 1e-12, Identity))
    }));
    out
}

fn cr_algebra_suite(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n;
    let inp = json!({ "n": n });
    let mut out = vec![];
    match bracket_table(n) {
        Ok(t) => {
            out.push(Record::exact("dimension", inp.clone(), n * n + 2 * n + 2, t.dim(), Literature));
            out.push(Record::exact("antisymmetry", inp.clone(), true, t.is_antisymmetric(), Identity));
            out.push(Record::exact("jacobi", inp.clone(), true, t.satisfies_jacobi(), Identity));
        }
        Err(e) => out.push(Record::error("bracket_table", inp.clone(), e.to_string(), Literature)),
    }
    match verify_ideal(n) {
        Ok(r) => {
            out.push(Record::exact("heisenberg_ideal", inp.clone(), true, r.is_ideal, Literature));
            out.push(Record::exact("quotient_un_plus_r", inp.clone(), true, r.ok(), Literature));
            out.push(Record::exact("ideal_dimension", inp.clone(), 2 * n + 1, r.dim_h, Identity));
            out.push(Record::exact("quotient_dimension", inp.clone(), n * n + 1, r.dim_quotient, Identity));
        }
        Err(e) => out.push(Record::error("verify_ideal", inp.clone(), e.to_string(), Literature)),
    }
    let s = SasakiStructure::right(n).expect("n validated");
    let pts = ball_points(n, cfg.samples, 2.0, cfg.seed.wrapping_add(3));
    let basis = cr_algebra::basis(n).expect("n validated");
    for e in &basis {
        let id = format!("cr_residual.{}", e.tag);
        let inp = json!({ "n": n, "field": e.tag.to_string(), "samples": pts.len() });
        out.push(guard(&id, inp.clone(), || {
            let m = max_over(&pts, |p| Ok(cr_residual(&e.field, &s, p)?.max()))?;
            Ok(Record::small(&id, inp.clone(), m, 1e-9, Literature))
        }));
    }
    for e in &basis {
        let id = format!("hamiltonian_roundtrip.{}", e.tag);
        let inp = json!({ "n": n, "field": e.tag.to_string() });
        out.push(guard(&id, inp.clone(), || {
            let back = hamiltonian_field(&hamiltonian(&e.field)?, n)?;
            Ok(Record::exact(&id, inp.clone(), true, back == e.field, Identity))
        }));
    }
    out.push(guard("non_cr_field_detected", inp.clone(), || {
        let d = 2 * n + 1;
        let x = PolyVectorField::from_pairs(n, vec![(n, &Poly::var(d, 0) * &Poly::var(d, 0))]);
        let m = max_over(&pts, |p| Ok(cr_residual(&x, &s, p)?.max()))?;
        Ok(Record::at_least("non_cr_field_detected", inp.clone(), 1e-3, m, Identity))
    }));
    // X_ii rotates its block at rate 2; X_ij (i ≠ j) has period 2π
    let (j, period) = if n == 1 { (0, PI) } else { (1, 2.0 * PI) };
    let x = cr_algebra::x_field(n, 0, j);
    let fid = format!("flow_periodic.X{}{}", 1, j + 1);
    let inp_f = json!({ "n": n, "period": period });
    out.push(guard(&fid, inp_f.clone(), || {
        let m = max_over(&pts[..pts.len().min(5)], |p| {
            let q = cr_algebra::flow(&x, p, period, OdeOptions::default())?;
            Ok(sup_diff(&q, p))
        })?;
        Ok(Record::small(&fid, inp_f.clone(), m, 1e-7, Literature))
    }));
    if n >= 2 {
        out.push(guard("x12_closed_form", inp.clone(), || {
            let m = max_over(&pts[..pts.len().min(5)], |p| {
                let t = 1.3;
                Ok(sup_diff(&cr_algebra::flow(&x, p, t, OdeOptions::default())?, &cr_algebra::x12_flow_closed(p, t)?))
            })?;
            Ok(Record::small("x12_closed_form", inp.clone(), m, 1e-8, Computed))
        }));
    }
    out
}

fn grid(n: usize) -> Vec<ConeParams> {
    [0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|v| ConeParams::new(vec![*v; n]).expect("non-negative"))
        .collect()
}

fn sasaki_cone(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n;
    let d = 2 * n + 1;
    let nf = n as f64;
    let pts = ball_points(n, cfg.samples, 1.5, cfg.seed.wrapping_add(4));
    let inp = json!({ "n": n, "a": vec![0.0; n], "samples": pts.len() });
    let right = SasakiStructure::right(n).expect("n validated");
    let g = right.metric_field();
    let mut out = vec![];
    out.push(guard("scalar_standard", inp.clone(), || {
        let m = max_over(&pts, |p| Ok((curvature(&g, p)?.scalar + 2.0 * nf).abs()))?;
        Ok(Record::close("scalar_standard", inp.clone(), -2.0 * nf, -2.0 * nf + m, 1e-8, Literature))
    }));
    out.push(guard("phi_sectional", inp.clone(), || {
        let mut r = rng(cfg.seed.wrapping_add(5));
        let us: Vec<Vec<f64>> = pts.iter().map(|_| gaussian_vector(&mut r, d)).collect();
        let ks: Vec<f64> = pts
            .par_iter()
            .zip(&us)
            .map(|(p, u)| phi_sectional_of(&right, &curvature(&g, p)?, p, u))
            .collect::<Result<_>>()?;
        let worst = ks.iter().fold(-3.0f64, |w, k| if (k + 3.0).abs() > (w + 3.0).abs() { *k } else { w });
        Ok(Record::close("phi_sectional", inp.clone(), -3.0, worst, 1e-8, Literature))
    }));
    out.push(guard("null_eta_einstein", inp.clone(), || {
        let m = max_over(&pts, |p| Ok(eta_einstein_residual(&right, &curvature(&g, p)?, p)))?;
        Ok(Record::small("null_eta_einstein", inp.clone(), m, 1e-8, Literature))
    }));
    out.push(guard("reeb_sectional", inp.clone(), || {
        let m = max_over(&pts, |p| {
            let rep = curvature(&g, p)?;
            let v = unit(d, 0);
            let eta = right.eta(p);
            let xi = right.xi(p);
            let h: Vec<f64> = v.iter().zip(&xi).map(|(a, b)| a - eta[0] * b).collect();
            Ok((rep.sectional(&xi, &h)? - 1.0).abs())
        })?;
        Ok(Record::small("reeb_sectional", inp.clone(), m, 1e-8, Computed))
    }));

    let zero = ConeParams::zero(n);
    out.push(guard("variance.a=0", inp.clone(), || {
        let r = extremality_report(&zero, n, &pts)?;
        Ok(Record::small("variance.a=0", inp.clone(), r.scalar_variance, 1e-10, Literature))
    }));
    for a in grid(n) {
        let inp = json!({ "n": n, "a": a.a(), "samples": pts.len() });
        let tag = format!("a={}", a.a()[0]);
        match extremality_report(&a, n, &pts) {
            Ok(r) => {
                out.push(Record::small(&format!("affine_residual.{}", tag), inp.clone(), r.affine_residual, 1e-8, Literature));
                out.push(Record::at_least(&format!("variance.{}", tag), inp.clone(), 1e-3, r.scalar_variance, Literature));
            }
            Err(e) => out.push(Record::error(&format!("extremality.{}", tag), inp, e.to_string(), Literature)),
        }
    }

    let cal_a = if cfg.cone().is_zero() { ConeParams::new(vec![1.0; n]).expect("positive") } else { cfg.cone() };
    let held = ball_points(n, cfg.samples, 2.5, cfg.seed.wrapping_add(6));
    let inp_c = json!({ "n": n, "a": cal_a.a(), "fit_samples": pts.len(), "held_out": held.len() });
    match calibrate_constants(&cal_a, n, &pts) {
        Ok(cal) => {
            out.push(guard("closed_form_held_out", inp_c.clone(), || {
                let m = max_over(&held, |p| Ok((scalar_closed_form(&cal, p)? - engine_scalar(&cal_a, p)?).abs()))?;
                Ok(Record::small("closed_form_held_out", inp_c.clone(), m, 1e-6, Computed))
            }));
            let c0 = 16.0 * (nf + 1.0) * cal_a.norm1() - 2.0 * nf;
            out.push(Record::close("calibrated_c0", inp_c.clone(), c0, cal.c0, 1e-8, Computed));
            for (i, (c, ai)) in cal.c.iter().zip(cal_a.a()).enumerate() {
                out.push(Record::close(&format!("calibrated_c{}", i + 1), inp_c.clone(), -8.0 * (nf + 1.0) * (nf + 2.0) * ai * ai, *c, 1e-8, Computed));
            }
        }
        Err(e) => out.push(Record::error("calibration", inp_c, e.to_string(), Computed)),
    }

    let mut flows = vec![ConeParams::zero(n), ConeParams::new(vec![0.5; n]).expect("positive")];
    if !flows.contains(&cfg.cone()) {
        flows.push(cfg.cone());
    }
    let ts: Vec<f64> = (1..=(cfg.t_max * 4.0).ceil() as usize).map(|k| (k as f64 * 0.25).min(cfg.t_max)).collect();
    let starts = &pts[..pts.len().min(4)];
    for a in flows {
        let id = format!("reeb_flow.a={:?}", a.a());
        let inp = json!({ "n": n, "a": a.a(), "t_max": cfg.t_max, "starts": starts.len() });
        out.push(guard(&id, inp.clone(), || {
            let m = max_over(starts, |p| {
                let num = reeb_flow_numeric(&a, p, &ts, OdeOptions::default())?;
                let mut w: f64 = 0.0;
                for (t, q) in ts.iter().zip(&num) {
                    w = w.max(sup_diff(q, &reeb_flow_closed(&a, p, *t)?));
                }
                Ok(w)
            })?;
            Ok(Record::small(&id, inp.clone(), m, 1e-6, Computed))
        }));
    }

    let neg = ConeElement { a0: 1.0, b: vec![-0.1; n] };
    let inp_n = json!({ "a0": 1.0, "b": neg.b });
    out.push(guard("positivity_witness", inp_n.clone(), || {
        let v = positivity(&neg, n)?;
        let mut q = vec![0.0; d];
        if let (Some(r), Some(i)) = (v.witness_radius, v.witness_block) {
            q[i] = r;
        }
        let pair = reeb_pairing(&neg, &q);
        Ok(if v.positive {
            Record::exact("positivity_witness", inp_n.clone(), false, true, Identity)
        } else {
            Record::small("positivity_witness", inp_n.clone(), pair.max(0.0), 1e-12, Identity)
        })
    }));
    let pos = ConeElement { a0: 2.0, b: (1..=n).rev().map(|i| i as f64).collect() };
    let inp_p = json!({ "a0": pos.a0, "b": pos.b });
    out.push(guard("reduction", inp_p.clone(), || {
        let r = reduce(&pos)?;
        let want: Vec<f64> = (1..=n).map(|i| i as f64 / 2.0).collect();
        let again = reduce(&ConeElement { a0: 1.0, b: r.a().to_vec() })?;
        let res = sup_diff(r.a(), &want).max(sup_diff(again.a(), r.a()));
        Ok(Record::small("reduction", inp_p.clone(), res, 1e-15, Identity))
    }));
    out
}

fn subriemannian(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n;
    let d = 2 * n + 1;
    let origin = vec![0.0; d];
    let ex = unit(d, 0);
    let ez = unit(d, d - 1);
    let two_sqrt_pi = 2.0 * PI.sqrt();
    let pts = ball_points(n, cfg.samples, 2.0, cfg.seed.wrapping_add(7));
    let opts = ShootingOptions { seed: cfg.seed, ..Default::default() };
    let mut out = vec![];
    let inp = json!({ "n": n, "samples": pts.len() });
    out.push(guard("bracket_rank", inp.clone(), || {
        let ranks: Vec<usize> = pts.iter().map(|p| bracket_rank(n, p)).collect::<Result<_>>()?;
        Ok(Record::exact("bracket_rank", inp.clone(), d, *ranks.iter().min().unwrap_or(&0), Literature))
    }));
    out.push(guard("horizontal_rank", inp.clone(), || {
        let ranks: Vec<usize> = pts.iter().map(|p| horizontal_rank(n, p)).collect::<Result<_>>()?;
        Ok(Record::exact("horizontal_rank", inp.clone(), 2 * n, *ranks.iter().max().unwrap_or(&0), Identity))
    }));
    out.push(guard("lift_is_horizontal", inp.clone(), || {
        let mut r = rng(cfg.seed.wrapping_add(8));
        let controls: Vec<Vec<f64>> = (0..16).map(|_| gaussian_vector(&mut r, 2 * n)).collect();
        let path = lift(&controls, &pts[0])?;
        Ok(Record::small("lift_is_horizontal", inp.clone(), path.horizontal_residual(), 1e-12, Identity))
    }));

    // the lattice grows like R^{2n}·R², so n ≥ 2 runs coarse
    let res = if n == 1 { cfg.resolution } else { 8 };
    let dom = cfg.domain();
    for (name, q, exact) in [("horizontal", &ex, 1.0), ("vertical", &ez, two_sqrt_pi)] {
        let inp = json!({ "n": n, "p": origin, "q": q, "resolution": res, "box": [dom.half_width, dom.half_height] });
        match dist_graph(&origin, q, res, DistanceMode::Cc, &dom) {
            Ok(e) => {
                if n == 1 {
                    out.push(Record::relative(&format!("graph.{}", name), inp.clone(), exact, e.value, 0.05, Literature));
                }
                let (lo, hi) = (e.lower(), e.upper());
                let miss = (lo - exact).max(exact - hi).max(0.0);
                let mut rec = Record::small(&format!("graph_bracket.{}", name), inp.clone(), miss, 0.0, Computed);
                rec.observed = json!([lo, hi]);
                rec.expected = json!(exact);
                out.push(rec);
            }
            Err(e) => out.push(Record::error(&format!("graph.{}", name), inp, e.to_string(), Computed)),
        }
        let inp = json!({ "n": n, "p": origin, "q": q });
        out.push(guard(&format!("shooting.{}", name), inp.clone(), || {
            let v = dist_shooting(&origin, q, DistanceMode::Cc, &opts)?.value;
            Ok(Record::close(&format!("shooting.{}", name), inp.clone(), exact, v, 1e-3, Literature))
        }));
        out.push(guard(&format!("closed_form.{}", name), inp.clone(), || {
            let v = cc_distance_closed(&origin, q)?;
            Ok(Record::close(&format!("closed_form.{}", name), inp.clone(), exact, v, 1e-12, Literature))
        }));
    }

    let inp_t = json!({ "n": n, "p": origin, "q": ez, "schedule": cfg.l_schedule });
    match convergence_table(&origin, &ez, &cfg.l_schedule, &opts, 1e-6) {
        Ok(t) => {
            out.push(Record::exact("penalized_monotone", inp_t.clone(), true, t.monotone, Literature));
            out.push(Record::exact("penalized_below_cc", inp_t.clone(), true, t.bounded, Literature));
            let last = t.rows.last().expect("non-empty schedule");
            out.push(Record::small("penalized_final_gap", inp_t.clone(), last.gap / t.d_cc, 0.05, Computed));
        }
        Err(e) => out.push(Record::error("penalized", inp_t, e.to_string(), Computed)),
    }
    let mut q = ex.clone();
    q[d - 1] = 0.5;
    for lambda in [2.0, 3.0] {
        let id = format!("homogeneity.lambda={}", lambda);
        let inp = json!({ "n": n, "p": origin, "q": q, "lambda": lambda });
        out.push(guard(&id, inp.clone(), || {
            let h = homogeneity_check(lambda, &origin, &q, &opts)?;
            Ok(Record::relative(&id, inp.clone(), lambda, h.ratio, 0.05, Literature))
        }));
    }
    out
}

fn quotients(cfg: &RunConfig) -> Vec<Record> {
    let n = cfg.n;
    let spec = &cfg.lattice;
    let pts = ball_points(n, cfg.samples.min(10), 1.5, cfg.seed.wrapping_add(9));
    let inp = json!({ "lattice": spec.to_string(), "samples": pts.len() });
    let mut out = vec![];
    out.push(guard("invariance.a=0", inp.clone(), || {
        let r = invariance_residual(&ConeParams::zero(n), spec, &pts)?;
        Ok(Record::small("invariance.a=0", inp.clone(), r, 1e-10, Literature))
    }));
    for a in grid(n) {
        let id = format!("non_invariance.a={}", a.a()[0]);
        let inp = json!({ "lattice": spec.to_string(), "a": a.a(), "samples": pts.len() });
        out.push(guard(&id, inp.clone(), || {
            let r = invariance_residual(&a, spec, &pts)?;
            Ok(Record::at_least(&id, inp.clone(), 1e-3, r, Literature))
        }));
    }
    for k in 1..=3u64 {
        let id = format!("homology.k={}", k);
        let inp = json!({ "n": n, "k": k });
        out.push(guard(&id, inp.clone(), || {
            let h = homology(&LatticeSpec::uniform(n, k)?)?;
            let want = if k > 1 { format!("Z^{} + Z_{}", 2 * n, k) } else { format!("Z^{}", 2 * n) };
            Ok(Record::exact(&id, inp.clone(), want, h.to_string(), Literature))
        }));
    }
    out.push(guard("homology.configured", inp.clone(), || {
        let h = homology(spec)?;
        let t = spec.expected_torsion();
        let want = if t > 1 { vec![t] } else { vec![] };
        Ok(Record::exact("homology.configured", inp.clone(), (2 * n, want), (h.free_rank, h.torsion), Computed))
    }));
    out.push(guard("projected_covolume", inp.clone(), || {
        let want: u64 = match spec {
            LatticeSpec::Uniform { k, .. } => k.pow(2 * n as u32),
            LatticeSpec::Graded { l } => l.iter().product(),
        };
        Ok(Record::exact("projected_covolume", inp.clone(), want, projected_lattice(spec)?.covolume, Computed))
    }));
    let far: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| 7.3 * v).collect()).collect();
    out.push(guard("deck_reduction", inp.clone(), || {
        let mut res: f64 = 0.0;
        let mut ok = true;
        for p in &far {
            let pt = Point::from_flat(p)?;
            let r = reduce_point(&pt, spec)?;
            res = res.max(sup_diff(&r.representative.mul(&r.deck)?.to_flat(), p));
            ok &= in_fundamental_box(&r.representative, spec);
            let exact = reduce_point(&rational_point(&pt)?, spec)?;
            ok &= exact.representative.mul(&exact.deck)? == rational_point(&pt)?;
            ok &= spec.contains(&deck_to_int(&exact.deck)?);
        }
        let mut rec = Record::small("deck_reduction", inp.clone(), if ok { res } else { f64::INFINITY }, 1e-9, Identity);
        rec.observed = json!({ "max_roundtrip": res, "exact_checks": ok });
        Ok(rec)
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_over_propagates_nan() {
        let pts = vec![vec![0.0], vec![1.0]];
        assert!(max_over(&pts, |p| Ok(if p[0] > 0.5 { f64::NAN } else { 1.0 })).unwrap().is_nan());
        assert_eq!(max_over(&pts, |p| Ok(p[0] + 2.0)).unwrap(), 3.0);
    }
}
