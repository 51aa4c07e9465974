use heiscr_core::ode::OdeOptions;
use heiscr_core::sampling::ball_points;
use heiscr_core::sasaki_cone::*;
use heiscr_core::heisenberg::ContactMetric;
use heiscr_core::tensor::curvature;
use proptest::prelude::*;

fn element(n: usize) -> impl Strategy<Value = ConeElement> {
    (-1.0f64..2.0, prop::collection::vec(-1.0f64..2.0, n)).prop_map(|(a0, b)| ConeElement { a0, b })
}

proptest! {
    #[test]
    fn positivity_cone_is_convex(e in element(2), f in element(2), t in 0.0f64..1.0) {
        let pe = positivity(&e, 2).unwrap().positive;
        let pf = positivity(&f, 2).unwrap().positive;
        if pe && pf {
            let m = ConeElement {
                a0: t * e.a0 + (1.0 - t) * f.a0,
                b: e.b.iter().zip(&f.b).map(|(x, y)| t * x + (1.0 - t) * y).collect(),
            };
            prop_assert!(positivity(&m, 2).unwrap().positive);
        }
    }

    #[test]
    fn positivity_witness_is_a_witness(e in element(2), p in prop::array::uniform5(-3.0f64..3.0)) {
        let v = positivity(&e, 2).unwrap();
        if v.positive {
            prop_assert!(reeb_pairing(&e, &p) > 0.0);
        } else {
            let r = v.witness_radius.unwrap();
            let mut q = [0.0; 5];
            if let Some(i) = v.witness_block { q[i] = r; }
            prop_assert!(reeb_pairing(&e, &q) <= 1e-12);
        }
    }

    #[test]
    fn reduction_is_idempotent_weyl_and_dilation_invariant(e in element(3), s in 0.1f64..5.0) {
        if let Ok(r) = reduce(&e) {
            let again = reduce(&ConeElement { a0: 1.0, b: r.a().to_vec() }).unwrap();
            prop_assert_eq!(&again, &r);
            let mut b = e.b.clone();
            b.reverse();
            prop_assert_eq!(&reduce(&ConeElement { a0: e.a0, b }).unwrap(), &r);
            let scaled = reduce(&ConeElement { a0: s * e.a0, b: e.b.iter().map(|v| s * v).collect() }).unwrap();
            for (x, y) in scaled.a().iter().zip(r.a()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn moment_map_is_bounded(a in prop::collection::vec(0.0f64..3.0, 2), p in prop::array::uniform5(-5.0f64..5.0)) {
        let cp = ConeParams::new(a.clone()).unwrap();
        let h = moment_map(&cp, &p).unwrap().h;
        let s: f64 = a.iter().zip(&h).map(|(a, h)| a * h).sum();
        prop_assert!(h.iter().all(|v| *v >= 0.0));
        prop_assert!(s < 1.0);
    }
}

#[test]
fn reeb_flows_agree_with_the_integrator() {
    let ts: Vec<f64> = (1..=40).map(|k| k as f64 * 0.25).collect();
    for a in [vec![0.0], vec![0.5], vec![1.0, 2.0]] {
        let n = a.len();
        let cp = ConeParams::new(a).unwrap();
        for p in ball_points(n, 4, 1.5, 13) {
            let num = reeb_flow_numeric(&cp, &p, &ts, OdeOptions::default()).unwrap();
            for (t, q) in ts.iter().zip(&num) {
                let c = reeb_flow_closed(&cp, &p, *t).unwrap();
                let err = q.iter().zip(&c).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                assert!(err < 1e-6, "t={} err={}", t, err);
            }
        }
    }
}

#[test]
fn reeb_flow_preserves_the_moment_map() {
    let cp = ConeParams::new(vec![0.7, 1.3]).unwrap();
    for p in ball_points(2, 5, 1.5, 17) {
        let h0 = moment_map(&cp, &p).unwrap().h;
        let q = reeb_flow_closed(&cp, &p, 3.7).unwrap();
        let h1 = moment_map(&cp, &q).unwrap().h;
        for (a, b) in h0.iter().zip(&h1) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn calibration_predicts_held_out_points() {
    for (n, a) in [(1, vec![1.0]), (1, vec![0.25]), (2, vec![0.5, 2.0])] {
        let cp = ConeParams::new(a).unwrap();
        let cal = calibrate_checked(&cp, n, &ball_points(n, 30, 2.0, 100), 1e-8).unwrap();
        for p in ball_points(n, 20, 2.5, 200) {
            let s = engine_scalar(&cp, &p).unwrap();
            assert!((scalar_closed_form(&cal, &p).unwrap() - s).abs() < 1e-6);
        }
    }
}

#[test]
fn calibrated_constants_follow_the_weight_pattern() {
    // s = 16(n+1)|a| − 2n − 8(n+1)(n+2) Σ a_i² h_i for the half-Levi normalization
    for (n, a) in [(1, vec![1.0]), (1, vec![0.3]), (2, vec![0.5, 1.0]), (2, vec![0.25, 0.25]), (3, vec![1.0, 1.0, 1.0]), (3, vec![0.2, 0.5, 0.7])] {
        let cp = ConeParams::new(a.clone()).unwrap();
        let cal = calibrate_constants(&cp, n, &ball_points(n, 30, 2.0, 7)).unwrap();
        let nf = n as f64;
        assert!((cal.c0 - (16.0 * (nf + 1.0) * cp.norm1() - 2.0 * nf)).abs() < 1e-8, "{:?}", cal);
        for (c, ai) in cal.c.iter().zip(&a) {
            assert!((c + 8.0 * (nf + 1.0) * (nf + 2.0) * ai * ai).abs() < 1e-8, "{:?}", cal);
        }
    }
}

#[test]
fn perturbed_metric_breaks_the_affine_law() {
    let cp = ConeParams::new(vec![1.0]).unwrap();
    let s = deform(&cp, 1).unwrap();
    let g = PerturbedMetric { base: &s, eps: 0.3 };
    let cal = calibrate_metric(&g, &cp, &ball_points(1, 30, 2.0, 3)).unwrap();
    assert!(cal.residual > 1e-3, "{}", cal.residual);
}

#[test]
fn degenerate_sample_design_is_reported() {
    let cp = ConeParams::new(vec![1.0]).unwrap();
    let pts: Vec<Vec<f64>> = (0..10).map(|k| vec![0.0, 0.0, k as f64 * 0.1]).collect();
    assert!(calibrate_constants(&cp, 1, &pts).is_err());
}

#[test]
fn deformed_structures_have_constant_phi_sectional_curvature_only_at_zero() {
    let p = [0.4, -0.3, 0.2];
    let a = ConeParams::new(vec![1.0]).unwrap();
    let s = deform(&a, 1).unwrap();
    let rep = curvature(&s.metric_field(), &p).unwrap();
    assert!(eta_einstein_residual(&s, &rep, &p) > 1e-3);
    assert!((phi_sectional(&ConeParams::zero(1), &p, 0).unwrap() + 3.0).abs() < 1e-9);
}
