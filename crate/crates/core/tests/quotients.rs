use heiscr_core::heisenberg::Point;
use heiscr_core::quotients::*;
use heiscr_core::sampling::ball_points;
use heiscr_core::sasaki_cone::ConeParams;
use heiscr_core::tensor::Rational;
use proptest::prelude::*;

fn specs() -> Vec<LatticeSpec> {
    vec![
        LatticeSpec::uniform(1, 1).unwrap(),
        LatticeSpec::uniform(1, 2).unwrap(),
        LatticeSpec::uniform(2, 3).unwrap(),
        LatticeSpec::graded(vec![2]).unwrap(),
        LatticeSpec::graded(vec![2, 4]).unwrap(),
    ]
}

#[test]
fn homology_formula() {
    for n in 1..=2 {
        for k in 1..=3u64 {
            let h = homology(&LatticeSpec::uniform(n, k).unwrap()).unwrap();
            assert_eq!(h.free_rank, 2 * n);
            let want: Vec<u64> = if k > 1 { vec![k] } else { vec![] };
            assert_eq!(h.torsion, want);
        }
    }
    for spec in specs() {
        let h = homology(&spec).unwrap();
        assert_eq!(h.free_rank, 2 * spec.n());
        let t = spec.expected_torsion();
        assert_eq!(h.torsion, if t > 1 { vec![t] } else { vec![] });
    }
}

#[test]
fn invariance_dichotomy() {
    let grid = [0.25, 0.5, 1.0, 2.0];
    for spec in specs() {
        let n = spec.n();
        let pts = ball_points(n, 8, 1.5, 5);
        assert!(invariance_residual(&ConeParams::zero(n), &spec, &pts).unwrap() < 1e-10);
        for &v in &grid {
            let a = ConeParams::new(vec![v; n]).unwrap();
            assert!(invariance_residual(&a, &spec, &pts).unwrap() > 1e-3);
        }
    }
}

/// Gcd of all k×k minors equals d_1⋯d_k.
fn minors_gcd(a: &[Vec<i64>], k: usize) -> i64 {
    fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (k - 1..n)
            .flat_map(|last| {
                combos(last, k - 1).into_iter().map(move |mut c| {
                    c.push(last);
                    c
                })
            })
            .collect()
    }
    let mut g = 0i64;
    for rs in combos(a.len(), k) {
        for cs in combos(a[0].len(), k) {
            let sub: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c]).collect()).collect();
            g = num_integer::gcd(g, determinant(&sub).unwrap());
        }
    }
    g
}

fn word(spec: &LatticeSpec, idx: &[(usize, bool)]) -> Point<i64> {
    let gens = generators(spec);
    let mut g = Point::identity(spec.n());
    for &(i, inv) in idx {
        let h = &gens[i % gens.len()];
        g = g.mul(&if inv { h.inv() } else { h.clone() }).unwrap();
    }
    g
}

fn rational(v: (i64, i64)) -> Rational {
    Rational::new(v.0.into(), v.1.into())
}

proptest! {
    #[test]
    fn smith_form_matches_determinantal_divisors(a in prop::collection::vec(prop::collection::vec(-6i64..7, 3), 3)) {
        let s = smith_normal_form(&a).unwrap();
        let mut prod = 1i64;
        for k in 1..=3 {
            prod *= s.diagonal[k - 1];
            prop_assert_eq!(prod.abs(), minors_gcd(&a, k));
        }
    }

    #[test]
    fn lattices_are_subgroups(w1 in prop::collection::vec((0usize..9, any::<bool>()), 0..=6), w2 in prop::collection::vec((0usize..9, any::<bool>()), 0..=6), which in 0usize..5) {
        let spec = &specs()[which];
        let a = word(spec, &w1);
        let b = word(spec, &w2);
        prop_assert!(spec.contains(&a) && spec.contains(&b));
        prop_assert!(spec.contains(&a.mul(&b).unwrap()));
        prop_assert!(spec.contains(&a.inv()));
    }

    #[test]
    fn reduction_is_a_coset_section(
        x in (-40i64..40, 1i64..8), y in (-40i64..40, 1i64..8), z in (-40i64..40, 1i64..8),
        w in prop::collection::vec((0usize..3, any::<bool>()), 0..=6),
        which in 0usize..2,
    ) {
        let spec = [LatticeSpec::uniform(1, 2).unwrap(), LatticeSpec::graded(vec![3]).unwrap()][which].clone();
        let p = Point::new(vec![rational(x)], vec![rational(y)], rational(z)).unwrap();
        let r = reduce_point(&p, &spec).unwrap();
        prop_assert_eq!(r.representative.mul(&r.deck).unwrap(), p.clone());
        let deck = deck_to_int(&r.deck).unwrap();
        prop_assert!(spec.contains(&deck));
        let g = word(&spec, &w);
        let gq = Point { x: vec![Rational::from_integer(g.x[0].into())], y: vec![Rational::from_integer(g.y[0].into())], z: Rational::from_integer(g.z.into()) };
        let moved = reduce_point(&p.mul(&gq).unwrap(), &spec).unwrap();
        prop_assert_eq!(&moved.representative, &r.representative);
        let again = reduce_point(&r.representative, &spec).unwrap();
        prop_assert!(again.deck.is_identity());
    }
}

#[test]
fn projected_lattice_covolume() {
    assert_eq!(projected_lattice(&LatticeSpec::graded(vec![2, 4]).unwrap()).unwrap().covolume, 8);
    assert_eq!(projected_lattice(&LatticeSpec::uniform(2, 3).unwrap()).unwrap().covolume, 81);
}
