//! Diffeomorphisms of ℝ^{2n+1} and pullbacks of contact metric structures.
//!
//! For `φ` with Jacobian `J` the pulled-back structure at `p` is
//! `(J⁻¹ξ(φp), η(φp)·J, J⁻¹Φ(φp)J, Jᵀg(φp)J)`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::structure::{right_frame, ContactMetric};
use super::Point;
use crate::error::{check_dim, Error, Result};
use crate::tensor::jet::{Jet2, Scalar};

pub trait Diffeo {
    fn dim(&self) -> usize;
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S>;

    /// `J[a][b] = ∂_b φ^a` at `p`.
    fn jacobian(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let img = self.apply(&Jet2::seed(p));
        img.iter()
            .map(|c| (0..p.len()).map(|b| c.d(b)).collect())
            .collect()
    }
}

/// `p ↦ p·h`.
#[derive(Clone, Debug)]
pub struct RightTranslation(pub Point<f64>);
/// `p ↦ h·p`.
#[derive(Clone, Debug)]
pub struct LeftTranslation(pub Point<f64>);
/// `ι(x, y, z) = (y, x, z)`.
#[derive(Clone, Copy, Debug)]
pub struct Involution(pub usize);
/// `(x, y, z) ↦ (λx, λy, λ²z)`.
#[derive(Clone, Copy, Debug)]
pub struct Dilation {
    pub n: usize,
    pub lambda: f64,
}
/// `(x_i, y_i) ↦ (−x_i, −y_i)` for one block.
#[derive(Clone, Copy, Debug)]
pub struct Sigma {
    pub n: usize,
    pub i: usize,
}
/// `(x, y, z) ↦ (x + a, y + b, z + c + 2(a·y − b·x))`, the symmetry of
/// the intermediate model.
#[derive(Clone, Debug)]
pub struct IntermediateAction {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

/// A unitary transformation `w ↦ Uw` of ℂ^n = ℝ^{2n} lifted to the right
/// model: `z' = z − ½x·y + ½x'·y'`.
#[derive(Clone, Debug)]
pub struct UnitaryMap {
    n: usize,
    /// real 2n×2n matrix acting on `(x, y)`
    m: Vec<Vec<f64>>,
}

impl UnitaryMap {
    /// From `U = A + iB` given as real and imaginary parts. Fails unless `U`
    /// is unitary to `1e-12`.
    pub fn from_complex(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        check_dim(n, im.len())?;
        let mut m = vec![vec![0.0; 2 * n]; 2 * n];
        for r in 0..n {
            check_dim(n, re[r].len())?;
            check_dim(n, im[r].len())?;
            for c in 0..n {
                m[r][c] = re[r][c];
                m[r][n + c] = -im[r][c];
                m[n + r][c] = im[r][c];
                m[n + r][n + c] = re[r][c];
            }
        }
        let mat = DMatrix::from_fn(2 * n, 2 * n, |r, c| m[r][c]);
        let defect = (mat.transpose() * &mat - DMatrix::identity(2 * n, 2 * n)).amax();
        if defect > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary (defect {:e})",
                defect
            )));
        }
        Ok(UnitaryMap { n, m })
    }

    /// Rotation by `θ` in the complex `(w_i, w_j)` plane (the flow of `Y_ij`).
    pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut re = vec![vec![0.0; n]; n];
        let im = vec![vec![0.0; n]; n];
        for (k, row) in re.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        let (s, c) = theta.sin_cos();
        re[i][i] = c;
        re[j][j] = c;
        re[i][j] = -s;
        re[j][i] = s;
        UnitaryMap::from_complex(&re, &im).expect("rotation is unitary")
    }

    /// `w_i ↦ e^{iθ} w_i`.
    pub fn phase(n: usize, i: usize, theta: f64) -> Self {
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for (k, row) in re.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        re[i][i] = theta.cos();
        im[i][i] = theta.sin();
        UnitaryMap::from_complex(&re, &im).expect("phase is unitary")
    }

    /// Unitary with random entries, from the QR factorisation of a complex
    /// matrix embedded as a real 2n×2n matrix commuting with `J₀`.
    pub fn from_seed_matrix(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        // Gram–Schmidt over ℂ on the columns
        let n = re.len();
        let mut cols: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|c| (0..n).map(|r| (re[r][c], im[r][c])).collect())
            .collect();
        for c in 0..n {
            for prev in 0..c {
                // ⟨u_prev, v⟩ = Σ conj(u) v
                let (mut pr, mut pi) = (0.0, 0.0);
                for r in 0..n {
                    let (ur, ui) = cols[prev][r];
                    let (vr, vi) = cols[c][r];
                    pr += ur * vr + ui * vi;
                    pi += ur * vi - ui * vr;
                }
                for r in 0..n {
                    let (ur, ui) = cols[prev][r];
                    cols[c][r].0 -= pr * ur - pi * ui;
                    cols[c][r].1 -= pr * ui + pi * ur;
                }
            }
            let norm = cols[c].iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            if norm < 1e-9 {
                return Err(Error::InvalidParameter("seed matrix is singular".into()));
            }
            for e in cols[c].iter_mut() {
                e.0 /= norm;
                e.1 /= norm;
            }
        }
        let ure: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| cols[c][r].0).collect()).collect();
        let uim: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| cols[c][r].1).collect()).collect();
        UnitaryMap::from_complex(&ure, &uim)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.m
    }
}

impl Diffeo for RightTranslation {
    fn dim(&self) -> usize {
        2 * self.0.n() + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let h = &self.0;
        let n = h.n();
        let mut out = p.to_vec();
        let mut z = p[2 * n] + h.z;
        for i in 0..n {
            out[i] = p[i] + h.x[i];
            out[n + i] = p[n + i] + h.y[i];
            z = z + p[i] * h.y[i];
        }
        out[2 * n] = z;
        out
    }
}

impl Diffeo for LeftTranslation {
    fn dim(&self) -> usize {
        2 * self.0.n() + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let h = &self.0;
        let n = h.n();
        let mut out = p.to_vec();
        let mut z = p[2 * n] + h.z;
        for i in 0..n {
            out[i] = p[i] + h.x[i];
            out[n + i] = p[n + i] + h.y[i];
            z = z + p[n + i] * h.x[i];
        }
        out[2 * n] = z;
        out
    }
}

impl Diffeo for Involution {
    fn dim(&self) -> usize {
        2 * self.0 + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.0;
        let mut out = p.to_vec();
        for i in 0..n {
            out[i] = p[n + i];
            out[n + i] = p[i];
        }
        out
    }
}

impl Diffeo for Dilation {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.n;
        let mut out: Vec<S> = p.iter().map(|v| *v * self.lambda).collect();
        out[2 * n] = p[2 * n] * (self.lambda * self.lambda);
        out
    }
}

impl Diffeo for Sigma {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let mut out = p.to_vec();
        out[self.i] = -p[self.i];
        out[self.n + self.i] = -p[self.n + self.i];
        out
    }
}

impl Diffeo for IntermediateAction {
    fn dim(&self) -> usize {
        2 * self.a.len() + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.a.len();
        let mut out = p.to_vec();
        let mut z = p[2 * n] + self.c;
        for i in 0..n {
            out[i] = p[i] + self.a[i];
            out[n + i] = p[n + i] + self.b[i];
            z = z + (p[n + i] * self.a[i] - p[i] * self.b[i]) * 2.0;
        }
        out[2 * n] = z;
        out
    }
}

impl Diffeo for UnitaryMap {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }
    fn apply<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); 2 * n + 1];
        for r in 0..2 * n {
            let mut acc = S::zero();
            for c in 0..2 * n {
                if self.m[r][c] != 0.0 {
                    acc = acc + p[c] * self.m[r][c];
                }
            }
            out[r] = acc;
        }
        let mut z = p[2 * n];
        for i in 0..n {
            z = z - p[i] * p[n + i] * 0.5 + out[i] * out[n + i] * 0.5;
        }
        out[2 * n] = z;
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PullbackResiduals {
    pub xi: f64,
    pub eta: f64,
    pub phi: f64,
    pub metric: f64,
}

impl PullbackResiduals {
    pub fn max(&self) -> f64 {
        self.xi.max(self.eta).max(self.phi).max(self.metric)
    }
}

fn inverse(j: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = j.len();
    DMatrix::from_fn(d, d, |r, c| j[r][c])
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("map is not a local diffeomorphism".into()))
}

/// Residuals of `φ*T − U` at `p`: how far the pullback of `target` along
/// `map` is from `source`.
pub fn pullback_residuals<M, T, U>(map: &M, target: &T, source: &U, p: &[f64]) -> Result<PullbackResiduals>
where
    M: Diffeo,
    T: ContactMetric,
    U: ContactMetric,
{
    let d = p.len();
    check_dim(map.dim(), d)?;
    check_dim(target.dim(), d)?;
    check_dim(source.dim(), d)?;
    let q = map.apply(p);
    let j = map.jacobian(p);
    let jm = DMatrix::from_fn(d, d, |r, c| j[r][c]);
    let jinv = inverse(&j)?;

    let to_mat = |m: Vec<Vec<f64>>| DMatrix::from_fn(d, d, |r, c| m[r][c]);
    let to_vec = |v: Vec<f64>| nalgebra::DVector::from_vec(v);

    let xi_pb = &jinv * to_vec(target.xi(&q));
    let eta_pb = jm.transpose() * to_vec(target.eta(&q));
    let phi_pb = &jinv * to_mat(target.phi(&q)) * &jm;
    let g_pb = jm.transpose() * to_mat(target.metric(&q)) * &jm;

    Ok(PullbackResiduals {
        xi: (xi_pb - to_vec(source.xi(p))).amax(),
        eta: (eta_pb - to_vec(source.eta(p))).amax(),
        phi: (phi_pb - to_mat(source.phi(p))).amax(),
        metric: (g_pb - to_mat(source.metric(p))).amax(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrientationReport {
    /// Determinant of `dφ` restricted to `D`, in the frames `(V_i, U_i)`.
    pub horizontal_det: f64,
    /// `λ` in `φ*η = λη`.
    pub eta_scale: f64,
    /// `max |η(dφ(V))|` over the frame; zero iff `dφ` preserves `D`.
    pub contact_defect: f64,
}

impl OrientationReport {
    pub fn preserves_orientation(&self, tol: f64) -> bool {
        self.contact_defect <= tol && self.horizontal_det > 0.0 && self.eta_scale > 0.0
    }
}

/// Determinant of the induced map on `D = ker η^R` w.r.t. `(V_i, U_i)`.
pub fn horizontal_determinant<M: Diffeo>(map: &M, n: usize, p: &[f64]) -> Result<f64> {
    Ok(orientation_check(map, n, p)?.horizontal_det)
}

/// Orientation data of `map` relative to the right model's contact bundle.
pub fn orientation_check<M: Diffeo>(map: &M, n: usize, p: &[f64]) -> Result<OrientationReport> {
    let d = 2 * n + 1;
    check_dim(d, p.len())?;
    check_dim(d, map.dim())?;
    let q = map.apply(p);
    let j = map.jacobian(p);
    let s = super::structure::SasakiStructure::right(n)?;
    let eta_q = s.eta(&q);
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    let mut defect: f64 = 0.0;
    let mut col = 0;
    for i in 0..n {
        let (v, _) = right_frame(n, i);
        let vp = v.eval(p);
        let img: Vec<f64> = (0..d).map(|a| (0..d).map(|b| j[a][b] * vp[b]).sum()).collect();
        defect = defect.max(img.iter().zip(&eta_q).map(|(a, b)| a * b).sum::<f64>().abs());
        for r in 0..2 * n {
            block[(r, col)] = img[r];
        }
        col += 1;
    }
    for i in 0..n {
        let (_, u) = right_frame(n, i);
        let up = u.eval(p);
        let img: Vec<f64> = (0..d).map(|a| (0..d).map(|b| j[a][b] * up[b]).sum()).collect();
        defect = defect.max(img.iter().zip(&eta_q).map(|(a, b)| a * b).sum::<f64>().abs());
        for r in 0..2 * n {
            block[(r, col)] = img[r];
        }
        col += 1;
    }
    // columns ordered (V_1..V_n, U_1..U_n) on both sides
    let eta_pb: f64 = (0..d).map(|a| eta_q[a] * j[a][2 * n]).sum();
    Ok(OrientationReport {
        horizontal_det: block.determinant(),
        eta_scale: eta_pb,
        contact_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::super::structure::SasakiStructure;
    use super::*;

    fn sample(n: usize) -> Vec<f64> {
        (0..2 * n + 1).map(|k| 0.3 * k as f64 - 0.7).collect()
    }

    #[test]
    fn involution_intertwines_left_and_right() {
        for n in 1..=3 {
            let r = SasakiStructure::right(n).unwrap();
            let l = SasakiStructure::left(n).unwrap();
            let res = pullback_residuals(&Involution(n), &l, &r, &sample(n)).unwrap();
            assert!(res.max() < 1e-12, "{:?}", res);
        }
    }

    #[test]
    fn involution_jacobian_sign() {
        for n in 1..=3 {
            let j = Involution(n).jacobian(&sample(n));
            let m = DMatrix::from_fn(2 * n + 1, 2 * n + 1, |r, c| j[r][c]);
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m.determinant() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn right_translations_preserve_right_structure() {
        let s = SasakiStructure::right(2).unwrap();
        let h = Point::new(vec![0.4, -1.2], vec![2.0, 0.3], 0.9).unwrap();
        let res = pullback_residuals(&RightTranslation(h.clone()), &s, &s, &sample(2)).unwrap();
        assert!(res.max() < 1e-12);
        let res = pullback_residuals(&LeftTranslation(h), &s, &s, &sample(2)).unwrap();
        assert!(res.eta > 0.1);
    }

    #[test]
    fn unitary_and_sigma_are_automorphisms() {
        let s = SasakiStructure::right(2).unwrap();
        let u = UnitaryMap::rotation(2, 0, 1, 0.7);
        assert!(pullback_residuals(&u, &s, &s, &sample(2)).unwrap().max() < 1e-12);
        let ph = UnitaryMap::phase(2, 1, -1.3);
        assert!(pullback_residuals(&ph, &s, &s, &sample(2)).unwrap().max() < 1e-12);
        let sg = Sigma { n: 2, i: 1 };
        assert!(pullback_residuals(&sg, &s, &s, &sample(2)).unwrap().max() < 1e-12);
    }

    #[test]
    fn intermediate_action_is_a_symmetry() {
        let s = SasakiStructure::intermediate(2).unwrap();
        let m = IntermediateAction {
            a: vec![0.5, -1.0],
            b: vec![1.5, 0.25],
            c: -0.3,
        };
        assert!(pullback_residuals(&m, &s, &s, &sample(2)).unwrap().max() < 1e-12);
    }

    #[test]
    fn orientation_of_automorphisms() {
        let p = sample(1);
        let dil = orientation_check(&Dilation { n: 1, lambda: 2.0 }, 1, &p).unwrap();
        assert!(dil.preserves_orientation(1e-12));
        assert!((dil.eta_scale - 4.0).abs() < 1e-12);
        let rot = orientation_check(&UnitaryMap::phase(1, 0, 2.0), 1, &p).unwrap();
        assert!(rot.preserves_orientation(1e-12));
        let inv = orientation_check(&Involution(1), 1, &p).unwrap();
        assert!(inv.contact_defect > 0.1);
    }
}
