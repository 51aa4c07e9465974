use heiscr_core::heisenberg::Point;
use heiscr_core::tensor::{int, Rational};
use proptest::prelude::*;

/// Upper-triangular matrix model: `(x, y, z) ↦ [[1, xᵀ, z], [0, I, y], [0, 0, 1]]`.
fn to_matrix(p: &Point<Rational>) -> Vec<Vec<Rational>> {
    let n = p.n();
    let d = n + 2;
    let mut m = vec![vec![int(0); d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = int(1);
    }
    for i in 0..n {
        m[0][1 + i] = p.x[i].clone();
        m[1 + i][d - 1] = p.y[i].clone();
    }
    m[0][d - 1] = p.z.clone();
    m
}

fn from_matrix(m: &[Vec<Rational>]) -> Point<Rational> {
    let d = m.len();
    let n = d - 2;
    Point {
        x: (0..n).map(|i| m[0][1 + i].clone()).collect(),
        y: (0..n).map(|i| m[1 + i][d - 1].clone()).collect(),
        z: m[0][d - 1].clone(),
    }
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(int(0), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

fn point(n: usize) -> impl Strategy<Value = Point<Rational>> {
    prop::collection::vec((-20i64..20, 1i64..5), 2 * n + 1).prop_map(move |v| {
        let r: Vec<Rational> = v.into_iter().map(|(a, b)| Rational::new(a.into(), b.into())).collect();
        Point::from_flat(&r).unwrap()
    })
}

fn pair_n() -> impl Strategy<Value = (Point<Rational>, Point<Rational>, Point<Rational>)> {
    (1usize..=3).prop_flat_map(|n| (point(n), point(n), point(n)))
}

proptest! {
    #[test]
    fn product_matches_matrix_model((p, q, _) in pair_n()) {
        let lhs = p.mul(&q).unwrap();
        let rhs = from_matrix(&matmul(&to_matrix(&p), &to_matrix(&q)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn associative((p, q, r) in pair_n()) {
        prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
    }

    #[test]
    fn inverse_both_sides((p, _, _) in pair_n()) {
        prop_assert!(p.mul(&p.inv()).unwrap().is_identity());
        prop_assert!(p.inv().mul(&p).unwrap().is_identity());
    }

    #[test]
    fn dilation_is_automorphism((p, q, _) in pair_n(), num in 1i64..7, den in 1i64..7) {
        let l = Rational::new(num.into(), den.into());
        let lhs = p.mul(&q).unwrap().dilation(&l).unwrap();
        let rhs = p.dilation(&l).unwrap().mul(&q.dilation(&l).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutators_are_central((p, q, r) in pair_n()) {
        let c = p.commutator(&q).unwrap();
        prop_assert!(c.x.iter().chain(&c.y).all(|v| *v == int(0)));
        prop_assert_eq!(c.mul(&r).unwrap(), r.mul(&c).unwrap());
    }

    #[test]
    fn involution_is_an_involution((p, _, _) in pair_n()) {
        prop_assert_eq!(p.involution().involution(), p);
    }
}
