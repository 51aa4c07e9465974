//! Evaluable tensor fields and first-order operations on them.
//!
//! Fields are evaluated generically over [`Scalar`]; evaluating at seeded
//! [`Jet2`] coordinates yields their first and second partial derivatives.

use super::jet::{Jet2, Scalar};
use crate::error::{check_dim, check_finite, Error, Result};

pub trait VectorField {
    fn dim(&self) -> usize;
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S>;
}

pub trait OneFormField {
    fn dim(&self) -> usize;
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S>;
}

/// Symmetric `(0,2)` tensor field, `components(p)[i][j] = g(∂_i, ∂_j)`.
pub trait MetricField {
    fn dim(&self) -> usize;
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>>;
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        (**self).components(p)
    }
}

impl<T: OneFormField + ?Sized> OneFormField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        (**self).components(p)
    }
}

impl<T: MetricField + ?Sized> MetricField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        (**self).components(p)
    }
}

/// The flat metric `δ_ij`.
#[derive(Clone, Copy, Debug)]
pub struct Euclidean {
    pub dim: usize,
}

impl MetricField for Euclidean {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components<S: Scalar>(&self, _p: &[S]) -> Vec<Vec<S>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| S::constant(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect()
    }
}

/// The zero vector field.
#[derive(Clone, Copy, Debug)]
pub struct ZeroField {
    pub dim: usize,
}

impl VectorField for ZeroField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components<S: Scalar>(&self, _p: &[S]) -> Vec<S> {
        vec![S::zero(); self.dim]
    }
}

fn jets_of_one_form<W: OneFormField>(w: &W, p: &[f64]) -> Result<Vec<Jet2>> {
    check_dim(w.dim(), p.len())?;
    let comps = w.components(&Jet2::seed(p));
    check_dim(w.dim(), comps.len())?;
    if comps.iter().all(Jet2::is_finite) {
        Ok(comps)
    } else {
        Err(Error::NonFinite("one-form".into()))
    }
}

fn jets_of_field<X: VectorField>(x: &X, p: &[f64]) -> Result<Vec<Jet2>> {
    check_dim(x.dim(), p.len())?;
    let comps = x.components(&Jet2::seed(p));
    check_dim(x.dim(), comps.len())?;
    if comps.iter().all(Jet2::is_finite) {
        Ok(comps)
    } else {
        Err(Error::NonFinite("vector field".into()))
    }
}

/// `dω` at `p`, as `Ω_ab = ∂_a ω_b − ∂_b ω_a`.
pub fn exterior_derivative<W: OneFormField>(w: &W, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let jets = jets_of_one_form(w, p)?;
    let d = p.len();
    Ok((0..d)
        .map(|a| (0..d).map(|b| jets[b].d(a) - jets[a].d(b)).collect())
        .collect())
}

/// `(£_X ω)(p)` by Cartan's formula `d(ω(X)) + ι_X dω`.
pub fn lie_derivative_form<X: VectorField, W: OneFormField>(
    x: &X,
    w: &W,
    p: &[f64],
) -> Result<Vec<f64>> {
    check_dim(x.dim(), w.dim())?;
    let wj = jets_of_one_form(w, p)?;
    let xj = jets_of_field(x, p)?;
    let pairing = wj
        .iter()
        .zip(&xj)
        .fold(Jet2::constant(0.0), |acc, (a, b)| acc + *a * *b);
    let dw = exterior_derivative(w, p)?;
    let d = p.len();
    let out: Vec<f64> = (0..d)
        .map(|b| pairing.d(b) + (0..d).map(|a| xj[a].value() * dw[a][b]).sum::<f64>())
        .collect();
    check_finite(&out, "Lie derivative")?;
    Ok(out)
}

/// Plain metric matrix at `p`, checked for symmetry and positive definiteness.
pub fn metric_at<G: MetricField>(g: &G, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_dim(g.dim(), p.len())?;
    let m = g.components(p);
    check_dim(g.dim(), m.len())?;
    for row in &m {
        check_dim(g.dim(), row.len())?;
        check_finite(row, "metric")?;
    }
    let d = m.len();
    let mat = nalgebra::DMatrix::from_fn(d, d, |i, j| 0.5 * (m[i][j] + m[j][i]));
    if nalgebra::linalg::Cholesky::new(mat).is_none() {
        return Err(Error::SingularMetric);
    }
    Ok(m)
}

/// `(£_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k` at `p`.
pub fn lie_derivative_metric<G: MetricField, X: VectorField>(
    g: &G,
    x: &X,
    p: &[f64],
) -> Result<Vec<Vec<f64>>> {
    check_dim(g.dim(), x.dim())?;
    check_dim(g.dim(), p.len())?;
    let seeds = Jet2::seed(p);
    let gj = g.components(&seeds);
    let xj = jets_of_field(x, p)?;
    let d = p.len();
    let mut out = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut v = 0.0;
            for k in 0..d {
                v += xj[k].value() * gj[i][j].d(k)
                    + gj[k][j].value() * xj[k].d(i)
                    + gj[i][k].value() * xj[k].d(j);
            }
            out[i][j] = v;
        }
        check_finite(&out[i], "Lie derivative of metric")?;
    }
    Ok(out)
}

/// Max-abs entry of `£_X g` at `p`; zero iff `X` is Killing there.
pub fn killing_residual<G: MetricField, X: VectorField>(g: &G, x: &X, p: &[f64]) -> Result<f64> {
    let l = lie_derivative_metric(g, x, p)?;
    Ok(l.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::field::{PolyOneForm, PolyVectorField};
    use crate::tensor::poly::Poly;

    #[test]
    fn exterior_derivative_matches_exact() {
        let eta = PolyOneForm::eta_right(1);
        let m = exterior_derivative(&eta, &[0.3, -0.7, 2.0]).unwrap();
        assert_eq!(m[0][1], 1.0);
        assert_eq!(m[1][0], -1.0);
        assert_eq!(m[2][0], 0.0);
    }

    #[test]
    fn lie_derivative_of_eta_along_reeb_vanishes() {
        let eta = PolyOneForm::eta_right(2);
        let xi = PolyVectorField::coord(2, 4);
        let l = lie_derivative_form(&xi, &eta, &[0.1, 0.2, -0.3, 0.4, 0.5]).unwrap();
        assert!(l.iter().all(|v| *v == 0.0));
        let zero = ZeroField { dim: 5 };
        let l0 = lie_derivative_form(&zero, &eta, &[0.1, 0.2, -0.3, 0.4, 0.5]).unwrap();
        assert!(l0.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lie_derivative_numeric_matches_exact() {
        let n = 1;
        let d = 3;
        let x = PolyVectorField::from_pairs(
            n,
            vec![
                (0, &Poly::var(d, 1) * &Poly::var(d, 2)),
                (1, Poly::var(d, 0)),
                (2, &Poly::var(d, 0) * &Poly::var(d, 0)),
            ],
        );
        let eta = PolyOneForm::eta_left(n);
        let exact = eta.lie_derivative(&x).unwrap();
        let p = [0.4, -1.1, 0.9];
        let num = lie_derivative_form(&x, &eta, &p).unwrap();
        for (a, b) in exact.eval(&p).iter().zip(&num) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn euclidean_translations_are_killing() {
        let g = Euclidean { dim: 3 };
        let x = PolyVectorField::coord(1, 0);
        assert_eq!(killing_residual(&g, &x, &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn singular_metric_is_rejected() {
        struct Degenerate;
        impl MetricField for Degenerate {
            fn dim(&self) -> usize {
                2
            }
            fn components<S: Scalar>(&self, _p: &[S]) -> Vec<Vec<S>> {
                vec![vec![S::one(), S::one()], vec![S::one(), S::one()]]
            }
        }
        assert_eq!(metric_at(&Degenerate, &[0.0, 0.0]), Err(Error::SingularMetric));
    }
}
