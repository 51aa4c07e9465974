//! Lattices `Γ ⊂ ℍ^{2n+1}`, the compact quotients `Γ\ℍ^{2n+1}` (deck group
//! acting on the right), descent of Sasakian structures and `H_1`.
//!
//! Two families: `Γ_k` (all coordinates in `kℤ`) and `Γ_l` with
//! `x ∈ ℤⁿ`, `y_i ∈ l_iℤ`, `z ∈ ℤ` for a divisibility chain `l_1 | … | l_n`.

mod normal_form;

pub use normal_form::{determinant, hermite_normal_form, mat_mul, smith_normal_form, IntMatrix, SmithForm};

use std::fmt;

use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::heisenberg::{pullback_residuals, ContactMetric, Coord, Point, RightTranslation};
use crate::sasaki_cone::{deform, ConeParams};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeSpec {
    Uniform { n: usize, k: u64 },
    Graded { l: Vec<u64> },
}

impl LatticeSpec {
    pub fn uniform(n: usize, k: u64) -> Result<Self> {
        if n == 0 || n > crate::MAX_N {
            return Err(Error::InvalidParameter(format!("n must lie in 1..={}", crate::MAX_N)));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("lattice parameter k must be ≥ 1".into()));
        }
        Ok(LatticeSpec::Uniform { n, k })
    }

    pub fn graded(l: Vec<u64>) -> Result<Self> {
        if l.is_empty() || l.len() > crate::MAX_N {
            return Err(Error::InvalidParameter(format!("l must have length 1..={}", crate::MAX_N)));
        }
        if l.iter().any(|v| *v == 0) {
            return Err(Error::InvalidParameter("entries of l must be ≥ 1".into()));
        }
        if let Some(w) = l.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidParameter(format!("divisibility violated: {} ∤ {}", w[0], w[1])));
        }
        Ok(LatticeSpec::Graded { l })
    }

    pub fn n(&self) -> usize {
        match self {
            LatticeSpec::Uniform { n, .. } => *n,
            LatticeSpec::Graded { l } => l.len(),
        }
    }

    /// Periods `(s, t_1..t_n, u)` of the generators `(s e_i,0,0)`,
    /// `(0,t_i e_i,0)`, `(0,0,u)`.
    fn periods(&self) -> (i64, Vec<i64>, i64) {
        match self {
            LatticeSpec::Uniform { n, k } => (*k as i64, vec![*k as i64; *n], *k as i64),
            LatticeSpec::Graded { l } => (1, l.iter().map(|v| *v as i64).collect(), 1),
        }
    }

    /// Order of the torsion of `H_1` predicted by the commutator relations.
    pub fn expected_torsion(&self) -> u64 {
        match self {
            LatticeSpec::Uniform { k, .. } => *k,
            LatticeSpec::Graded { l } => l[0],
        }
    }

    /// Exact membership test.
    pub fn contains(&self, g: &Point<i64>) -> bool {
        let (s, t, u) = self.periods();
        g.x.iter().all(|v| v % s == 0) && g.y.iter().zip(&t).all(|(v, t)| v % t == 0) && g.z % u == 0
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeSpec::Uniform { n, k } => write!(f, "Γ_k(n={}, k={})", n, k),
            LatticeSpec::Graded { l } => write!(f, "Γ_l(l={:?})", l),
        }
    }
}

/// Generators in the order `x_1..x_n, y_1..y_n, z`.
pub fn generators(spec: &LatticeSpec) -> Vec<Point<i64>> {
    let n = spec.n();
    let (s, t, u) = spec.periods();
    let mut out = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        let mut g = Point::identity(n);
        g.x[i] = s;
        out.push(g);
    }
    for i in 0..n {
        let mut g = Point::identity(n);
        g.y[i] = t[i];
        out.push(g);
    }
    let mut g = Point::identity(n);
    g.z = u;
    out.push(g);
    out
}

/// Coordinates of `g ∈ Γ` in the basis `X^α Y^β Z^γ` of the generators;
/// this is also the image of `g` in the abelianization.
pub fn exponents(spec: &LatticeSpec, g: &Point<i64>) -> Result<Vec<i64>> {
    if !spec.contains(g) {
        return Err(Error::InvalidParameter(format!("{:?} is not in {}", g, spec)));
    }
    let (s, t, u) = spec.periods();
    let mut e: Vec<i64> = g.x.iter().map(|v| v / s).collect();
    e.extend(g.y.iter().zip(&t).map(|(v, t)| v / t));
    let xy: i64 = g.x.iter().zip(&g.y).map(|(a, b)| a * b).sum();
    e.push((g.z - xy) / u);
    Ok(e)
}

/// Abelianized commutators of all generator pairs.
pub fn relation_matrix(spec: &LatticeSpec) -> Result<IntMatrix> {
    let gens = generators(spec);
    let mut rows = Vec::new();
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            let c = gens[a].commutator(&gens[b])?;
            rows.push(exponents(spec, &c)?);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// invariant factors > 1
    pub torsion: Vec<u64>,
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z_{}", t)));
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `H_1(Γ\ℍ^{2n+1}; ℤ) = Γ/[Γ, Γ]` from the Smith form of the relations.
pub fn homology(spec: &LatticeSpec) -> Result<AbelianGroup> {
    let rel = relation_matrix(spec)?;
    let ngen = 2 * spec.n() + 1;
    let snf = smith_normal_form(&rel)?;
    let nonzero: Vec<u64> = snf.diagonal.iter().filter(|d| **d != 0).map(|d| d.unsigned_abs()).collect();
    Ok(AbelianGroup {
        free_rank: ngen - nonzero.len(),
        torsion: nonzero.into_iter().filter(|d| *d > 1).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectedLattice {
    /// rows are basis vectors of `π(Γ) ⊂ ℝ^{2n}` (coordinates `x, y`)
    pub basis: IntMatrix,
    pub covolume: u64,
}

/// Basis of the projection `π(Γ)` forgetting `z`, in Hermite normal form.
pub fn projected_lattice(spec: &LatticeSpec) -> Result<ProjectedLattice> {
    let n = spec.n();
    let rows: IntMatrix = generators(spec)
        .iter()
        .map(|g| g.x.iter().chain(&g.y).cloned().collect())
        .collect();
    let basis = hermite_normal_form(&rows)?;
    if basis.len() != 2 * n {
        return Err(Error::InvalidParameter("projection is not a full lattice".into()));
    }
    let covolume = determinant(&basis)?.unsigned_abs();
    Ok(ProjectedLattice { basis, covolume })
}

/// Number types on which the fundamental-box reduction is exact or
/// correctly rounded.
pub trait Reducible: Coord + PartialOrd + FromPrimitive {
    fn floor_(&self) -> Self;
}

impl Reducible for f64 {
    fn floor_(&self) -> Self {
        self.floor()
    }
}

impl Reducible for BigRational {
    fn floor_(&self) -> Self {
        self.floor()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeckReduction<T = f64> {
    pub representative: Point<T>,
    /// `representative · deck = p`
    pub deck: Point<T>,
}

fn floor_mult<T: Reducible>(v: &T, m: i64) -> T {
    let m = T::from_i64(m).unwrap();
    (v.clone() / m.clone()).floor_() * m
}

/// Right-coset representative in the box `x_i ∈ [0, s)`, `y_i ∈ [0, t_i)`,
/// `z ∈ [0, u)`; y is normalized first, then x, then z.
pub fn reduce_point<T: Reducible>(p: &Point<T>, spec: &LatticeSpec) -> Result<DeckReduction<T>> {
    let n = spec.n();
    check_dim(n, p.n())?;
    let (s, t, u) = spec.periods();
    let mut gamma = Point::<T>::identity(n);
    for i in 0..n {
        gamma.y[i] = -floor_mult(&p.y[i], t[i]);
    }
    let p1 = p.mul(&gamma)?;
    let mut ga = Point::<T>::identity(n);
    for i in 0..n {
        ga.x[i] = -floor_mult(&p1.x[i], s);
    }
    let p2 = p1.mul(&ga)?;
    let mut gc = Point::<T>::identity(n);
    gc.z = -floor_mult(&p2.z, u);
    let rep = p2.mul(&gc)?;
    let total = gamma.mul(&ga)?.mul(&gc)?;
    Ok(DeckReduction {
        representative: rep,
        deck: total.inv(),
    })
}

/// Whether a float point lies in the fundamental box.
pub fn in_fundamental_box(p: &Point<f64>, spec: &LatticeSpec) -> bool {
    let (s, t, u) = spec.periods();
    p.x.iter().all(|v| *v >= 0.0 && *v < s as f64)
        && p.y.iter().zip(&t).all(|(v, t)| *v >= 0.0 && *v < *t as f64)
        && p.z >= 0.0
        && p.z < u as f64
}

/// Integer deck element from an exact reduction.
pub fn deck_to_int(g: &Point<BigRational>) -> Result<Point<i64>> {
    use num_traits::ToPrimitive;
    let conv = |v: &BigRational| -> Result<i64> {
        if !v.is_integer() {
            return Err(Error::InvalidParameter(format!("non-integral deck coordinate {}", v)));
        }
        v.to_integer().to_i64().ok_or_else(|| Error::InvalidParameter("deck coordinate overflow".into()))
    };
    Ok(Point {
        x: g.x.iter().map(conv).collect::<Result<_>>()?,
        y: g.y.iter().map(conv).collect::<Result<_>>()?,
        z: conv(&g.z)?,
    })
}

fn to_f64(g: &Point<i64>) -> Point<f64> {
    Point {
        x: g.x.iter().map(|v| *v as f64).collect(),
        y: g.y.iter().map(|v| *v as f64).collect(),
        z: g.z as f64,
    }
}

/// Max over generators (and their inverses) and samples of the pullback
/// residuals of `s` under right translation.
pub fn structure_invariance_residual<S: ContactMetric>(s: &S, spec: &LatticeSpec, samples: &[Vec<f64>]) -> Result<f64> {
    check_dim(2 * spec.n() + 1, s.dim())?;
    let mut worst: f64 = 0.0;
    for g in generators(spec) {
        for h in [to_f64(&g), to_f64(&g.inv())] {
            let map = RightTranslation(h);
            for p in samples {
                worst = worst.max(pullback_residuals(&map, s, s, p)?.max());
            }
        }
    }
    Ok(worst)
}

/// Invariance residual of the deformed structure `S_{1,a}` under the deck
/// group; zero exactly when `a = 0`.
pub fn invariance_residual(a: &ConeParams, spec: &LatticeSpec, samples: &[Vec<f64>]) -> Result<f64> {
    let s = deform(a, spec.n())?;
    structure_invariance_residual(&s, spec, samples)
}

/// Convenience for tests and reports: the exact rational point.
pub fn rational_point(p: &Point<f64>) -> Result<Point<BigRational>> {
    let conv = |v: &f64| BigRational::from_f64(*v).ok_or_else(|| Error::NonFinite("point".into()));
    Ok(Point {
        x: p.x.iter().map(conv).collect::<Result<_>>()?,
        y: p.y.iter().map(conv).collect::<Result<_>>()?,
        z: conv(&p.z)?,
    })
}
