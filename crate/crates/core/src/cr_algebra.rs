//! The Lie algebra of infinitesimal CR transformations of the standard
//! structure on ℍ^{2n+1}: basis, structure constants, the ideal `h^{2n+1}`
//! with quotient `u(n) ⊕ ℝ`, CR residuals and flows.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::heisenberg::ContactMetric;
use crate::ode::{integrate_at, OdeOptions};
use crate::tensor::jet::Jet2;
use crate::tensor::poly::{int, Exponents, Poly, Rational};
use crate::tensor::{PolyOneForm, PolyVectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CrTag {
    Xi,
    R(usize),
    S(usize),
    /// `X_ij`, `i ≤ j`
    X(usize, usize),
    /// `Y_ij`, `i < j`
    Y(usize, usize),
    Dil,
}

impl CrTag {
    pub fn in_heisenberg(&self) -> bool {
        matches!(self, CrTag::Xi | CrTag::R(_) | CrTag::S(_))
    }
}

impl fmt::Display for CrTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrTag::Xi => write!(f, "ξ"),
            CrTag::R(i) => write!(f, "R{}", i + 1),
            CrTag::S(i) => write!(f, "S{}", i + 1),
            CrTag::X(i, j) => write!(f, "X{}{}", i + 1, j + 1),
            CrTag::Y(i, j) => write!(f, "Y{}{}", i + 1, j + 1),
            CrTag::Dil => write!(f, "D"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrBasisElement {
    pub tag: CrTag,
    pub field: PolyVectorField,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > crate::MAX_N {
        Err(Error::InvalidParameter(format!("n must be in 1..={}, got {}", crate::MAX_N, n)))
    } else {
        Ok(())
    }
}

fn var(n: usize, k: usize) -> Poly {
    Poly::var(2 * n + 1, k)
}

pub fn xi_field(n: usize) -> PolyVectorField {
    PolyVectorField::coord(n, 2 * n)
}

/// `R_i = ∂x_i`.
pub fn r_field(n: usize, i: usize) -> PolyVectorField {
    PolyVectorField::coord(n, i)
}

/// `S_i = ∂y_i + x_i∂z`.
pub fn s_field(n: usize, i: usize) -> PolyVectorField {
    PolyVectorField::from_pairs(n, vec![(n + i, Poly::one(2 * n + 1)), (2 * n, var(n, i))])
}

/// `X_ij = x_i∂y_j + x_j∂y_i − y_i∂x_j − y_j∂x_i + (x_i x_j − y_i y_j)∂z`.
pub fn x_field(n: usize, i: usize, j: usize) -> PolyVectorField {
    let (xi, xj, yi, yj) = (var(n, i), var(n, j), var(n, n + i), var(n, n + j));
    PolyVectorField::from_pairs(
        n,
        vec![
            (n + j, xi.clone()),
            (n + i, xj.clone()),
            (j, -&yi),
            (i, -&yj),
            (2 * n, &(&xi * &xj) - &(&yi * &yj)),
        ],
    )
}

/// `Y_ij = x_i∂x_j − x_j∂x_i + y_i∂y_j − y_j∂y_i`.
pub fn y_field(n: usize, i: usize, j: usize) -> PolyVectorField {
    PolyVectorField::from_pairs(
        n,
        vec![
            (j, var(n, i)),
            (i, -&var(n, j)),
            (n + j, var(n, n + i)),
            (n + i, -&var(n, n + j)),
        ],
    )
}

/// `D = 2z∂z + Σ(x_k∂x_k + y_k∂y_k)`.
pub fn dilation_field(n: usize) -> PolyVectorField {
    let mut pairs: Vec<(usize, Poly)> = (0..2 * n).map(|k| (k, var(n, k))).collect();
    pairs.push((2 * n, var(n, 2 * n).scale(&int(2))));
    PolyVectorField::from_pairs(n, pairs)
}

pub fn field_of(n: usize, tag: CrTag) -> PolyVectorField {
    match tag {
        CrTag::Xi => xi_field(n),
        CrTag::R(i) => r_field(n, i),
        CrTag::S(i) => s_field(n, i),
        CrTag::X(i, j) => x_field(n, i, j),
        CrTag::Y(i, j) => y_field(n, i, j),
        CrTag::Dil => dilation_field(n),
    }
}

/// The `n² + 2n + 2` basis fields in the order ξ, R, S, X, Y, D.
pub fn basis(n: usize) -> Result<Vec<CrBasisElement>> {
    check_n(n)?;
    let mut tags = vec![CrTag::Xi];
    tags.extend((0..n).map(CrTag::R));
    tags.extend((0..n).map(CrTag::S));
    for i in 0..n {
        for j in i..n {
            tags.push(CrTag::X(i, j));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            tags.push(CrTag::Y(i, j));
        }
    }
    tags.push(CrTag::Dil);
    Ok(tags
        .into_iter()
        .map(|tag| CrBasisElement {
            tag,
            field: field_of(n, tag),
        })
        .collect())
}

/// Contact vector field of the right model with Hamiltonian `F`:
/// `X = (F − Σ y_i F_{y_i})∂z − Σ F_{y_i}∂x_i + Σ(y_i F_z + F_{x_i})∂y_i`.
pub fn hamiltonian_field(f: &Poly, n: usize) -> Result<PolyVectorField> {
    check_dim(2 * n + 1, f.nvars())?;
    let fz = f.derivative(2 * n);
    let mut pairs = Vec::new();
    let mut zc = f.clone();
    for i in 0..n {
        let fy = f.derivative(n + i);
        let fx = f.derivative(i);
        let y = var(n, n + i);
        zc = &zc - &(&y * &fy);
        pairs.push((i, -&fy));
        pairs.push((n + i, &(&y * &fz) + &fx));
    }
    pairs.push((2 * n, zc));
    Ok(PolyVectorField::from_pairs(n, pairs))
}

/// `η^R(X)`, the Hamiltonian of a contact field.
pub fn hamiltonian(x: &PolyVectorField) -> Result<Poly> {
    PolyOneForm::eta_right(x.n()).contract(x)
}

type Key = (usize, Exponents);

fn flatten(x: &PolyVectorField) -> BTreeMap<Key, Rational> {
    let mut m = BTreeMap::new();
    for (k, c) in x.components().iter().enumerate() {
        for (e, v) in c.terms() {
            m.insert((k, e.clone()), v.clone());
        }
    }
    m
}

/// Express `target` exactly in the span of `basis`; `None` if it is not in
/// the span.
pub fn solve_in_span(basis: &[PolyVectorField], target: &PolyVectorField) -> Option<Vec<Rational>> {
    let cols: Vec<BTreeMap<Key, Rational>> = basis.iter().map(flatten).collect();
    let rhs = flatten(target);
    let mut keys: Vec<Key> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
    keys.extend(rhs.keys().cloned());
    keys.sort();
    keys.dedup();
    let m = cols.len();
    // augmented rows
    let mut rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|k| {
            let mut r: Vec<Rational> = cols
                .iter()
                .map(|c| c.get(k).cloned().unwrap_or_else(Rational::zero))
                .collect();
            r.push(rhs.get(k).cloned().unwrap_or_else(Rational::zero));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0;
    for c in 0..m {
        let Some(pr) = (r0..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(r0, pr);
        let inv = Rational::one() / rows[r0][c].clone();
        for v in rows[r0].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != r0 && !rows[r][c].is_zero() {
                let factor = rows[r][c].clone();
                for cc in 0..=m {
                    let delta = &factor * &rows[r0][cc];
                    rows[r][cc] -= delta;
                }
            }
        }
        pivots.push(c);
        r0 += 1;
    }
    if rows[r0..].iter().any(|r| !r[m].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); m];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = rows[r][m].clone();
    }
    // reconstruct exactly
    let mut acc = PolyVectorField::zero(target.n());
    for (b, s) in basis.iter().zip(&sol) {
        if !s.is_zero() {
            acc = acc.add(&b.scale(s)).ok()?;
        }
    }
    if &acc == target {
        Some(sol)
    } else {
        None
    }
}

/// Sparse structure constants `[e_i, e_j] = Σ_k c^k_ij e_k`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub n: usize,
    pub tags: Vec<CrTag>,
    table: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.tags.len()
    }

    pub fn index(&self, tag: CrTag) -> Option<usize> {
        self.tags.iter().position(|t| *t == tag)
    }

    /// Dense coefficient vector of `[e_i, e_j]`.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        if let Some(entries) = self.table.get(&(i, j)) {
            for (k, c) in entries {
                v[*k] = c.clone();
            }
        }
        v
    }

    pub fn bracket_tags(&self, a: CrTag, b: CrTag) -> Option<Vec<Rational>> {
        Some(self.bracket(self.index(a)?, self.index(b)?))
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Rational {
        self.table
            .get(&(i, j))
            .and_then(|e| e.iter().find(|(kk, _)| *kk == k).map(|(_, c)| c.clone()))
            .unwrap_or_else(Rational::zero)
    }

    /// Bracket of two coefficient vectors, using bilinearity.
    pub fn bracket_vec(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                if let Some(entries) = self.table.get(&(i, j)) {
                    let w = ui * vj;
                    for (k, c) in entries {
                        out[*k] += &w * c;
                    }
                }
            }
        }
        out
    }

    /// All nonzero entries `(i, j, k, c)` with `i < j`.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for ((i, j), e) in &self.table {
            if i < j {
                for (k, c) in e {
                    out.push((*i, *j, *k, c.clone()));
                }
            }
        }
        out
    }

    /// `true` iff `c^k_ij = −c^k_ji` for all entries.
    pub fn is_antisymmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let a = self.bracket(i, j);
                let b = self.bracket(j, i);
                a.iter().zip(&b).all(|(x, y)| (x + y).is_zero())
            })
        })
    }

    /// `true` iff the Jacobi identity holds exactly on all basis triples.
    pub fn satisfies_jacobi(&self) -> bool {
        let d = self.dim();
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); d];
            v[i] = Rational::one();
            v
        };
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (a, b, c) = (unit(i), unit(j), unit(k));
                    let t1 = self.bracket_vec(&self.bracket_vec(&a, &b), &c);
                    let t2 = self.bracket_vec(&self.bracket_vec(&b, &c), &a);
                    let t3 = self.bracket_vec(&self.bracket_vec(&c, &a), &b);
                    if t1
                        .iter()
                        .zip(&t2)
                        .zip(&t3)
                        .any(|((x, y), z)| !(x + y + z).is_zero())
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn format_vec(&self, v: &[Rational]) -> String {
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                if c.is_one() {
                    format!("{}", self.tags[k])
                } else {
                    format!("{}·{}", c, self.tags[k])
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Exact structure constants; a bracket outside the span is an error.
pub fn bracket_table(n: usize) -> Result<StructureConstants> {
    let b = basis(n)?;
    let fields: Vec<PolyVectorField> = b.iter().map(|e| e.field.clone()).collect();
    let mut table = BTreeMap::new();
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let br = fields[i].bracket(&fields[j])?;
            let sol = solve_in_span(&fields, &br).ok_or_else(|| {
                Error::ClosureFailure(format!("[{}, {}] = {}", b[i].tag, b[j].tag, br))
            })?;
            let entries: Vec<(usize, Rational)> = sol
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, c.clone()))
                .collect();
            if !entries.is_empty() {
                let neg = entries.iter().map(|(k, c)| (*k, -c.clone())).collect();
                table.insert((i, j), entries);
                table.insert((j, i), neg);
            }
        }
    }
    Ok(StructureConstants {
        n,
        tags: b.iter().map(|e| e.tag).collect(),
        table,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub bracket: String,
    pub value: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealReport {
    /// `[h, cr] ⊆ h`
    pub is_ideal: bool,
    /// brackets of `X`, `Y` close modulo `h` within `span{X, Y}`
    pub quotient_closes: bool,
    /// `D̄` commutes with everything in the quotient
    pub dilation_central: bool,
    /// linear parts of `X_ij, Y_ij` are skew and commute with `J₀`
    pub unitary_linear_parts: bool,
    /// `M_[A,B] = −[M_A, M_B]` for the linear parts
    pub linear_parts_antihomomorphic: bool,
    pub dim_cr: usize,
    pub dim_h: usize,
    pub dim_quotient: usize,
    /// rank of the linear parts of `X_ij, Y_ij` (`n²` for `u(n)`)
    pub rank_un: usize,
    pub witnesses: Vec<Witness>,
}

impl IdealReport {
    pub fn ok(&self) -> bool {
        self.is_ideal
            && self.quotient_closes
            && self.dilation_central
            && self.unitary_linear_parts
            && self.linear_parts_antihomomorphic
            && self.rank_un == self.dim_quotient - 1
    }
}

/// Linear part of a field on the `(x, y)` block: `M[r][c] = ∂_c X^r`.
fn linear_part(x: &PolyVectorField) -> Vec<Vec<Rational>> {
    let n = x.n();
    let d = 2 * n + 1;
    (0..2 * n)
        .map(|r| {
            (0..2 * n)
                .map(|c| {
                    let mut e = vec![0u32; d];
                    e[c] = 1;
                    x.component(r).coeff(&e)
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let k = a.len();
    (0..k)
        .map(|r| {
            (0..k)
                .map(|c| (0..k).fold(Rational::zero(), |acc, m| acc + &a[r][m] * &b[m][c]))
                .collect()
        })
        .collect()
}

fn matsub(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u - v).collect())
        .collect()
}

fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut r0 = 0;
    for c in 0..cols {
        let Some(p) = (r0..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(r0, p);
        for r in r0 + 1..m.len() {
            if !m[r][c].is_zero() {
                let f = &m[r][c] / &m[r0][c];
                for cc in c..cols {
                    let delta = &f * &m[r0][cc];
                    m[r][cc] -= delta;
                }
            }
        }
        r0 += 1;
        if r0 == m.len() {
            break;
        }
    }
    r0
}

/// Checks the exact sequence `0 → h → cr → u(n) ⊕ ℝ → 0`.
pub fn verify_ideal(n: usize) -> Result<IdealReport> {
    let sc = bracket_table(n)?;
    let d = sc.dim();
    let in_h: Vec<bool> = sc.tags.iter().map(CrTag::in_heisenberg).collect();
    let dim_h = in_h.iter().filter(|b| **b).count();
    let mut witnesses = Vec::new();

    let mut is_ideal = true;
    for i in 0..d {
        if !in_h[i] {
            continue;
        }
        for j in 0..d {
            let v = sc.bracket(i, j);
            let ok = v.iter().enumerate().all(|(k, c)| in_h[k] || c.is_zero());
            is_ideal &= ok;
            let named = matches!(
                (sc.tags[j], sc.tags[i]),
                (CrTag::X(0, 0), CrTag::R(0)) | (CrTag::Dil, CrTag::Xi)
            );
            if !ok || named {
                witnesses.push(Witness {
                    bracket: format!("[{}, {}]", sc.tags[j], sc.tags[i]),
                    value: sc.format_vec(&sc.bracket(j, i)),
                    ok,
                });
            }
        }
    }

    // quotient: drop h components
    let proj = |v: Vec<Rational>| -> Vec<Rational> {
        v.into_iter()
            .enumerate()
            .map(|(k, c)| if in_h[k] { Rational::zero() } else { c })
            .collect()
    };
    let dil = sc.index(CrTag::Dil).expect("D in basis");
    let mut quotient_closes = true;
    let mut dilation_central = true;
    for i in 0..d {
        if in_h[i] {
            continue;
        }
        for j in 0..d {
            if in_h[j] {
                continue;
            }
            let v = proj(sc.bracket(i, j));
            if i == dil || j == dil {
                let ok = v.iter().all(Rational::is_zero);
                dilation_central &= ok;
                if i == dil && sc.tags[j] == CrTag::X(0, 0) {
                    witnesses.push(Witness {
                        bracket: "[D̄, X̄11]".into(),
                        value: sc.format_vec(&v),
                        ok,
                    });
                }
            } else {
                quotient_closes &= v[dil].is_zero();
            }
        }
    }

    // u(n) relations through the linear parts
    let j0: Vec<Vec<Rational>> = (0..2 * n)
        .map(|r| {
            (0..2 * n)
                .map(|c| {
                    if r >= n && c + n == r {
                        int(1)
                    } else if r < n && c == r + n {
                        int(-1)
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let un: Vec<usize> = (0..d)
        .filter(|&k| matches!(sc.tags[k], CrTag::X(..) | CrTag::Y(..)))
        .collect();
    let fields: Vec<PolyVectorField> = sc.tags.iter().map(|t| field_of(n, *t)).collect();
    let lin: BTreeMap<usize, Vec<Vec<Rational>>> =
        un.iter().map(|&k| (k, linear_part(&fields[k]))).collect();
    let mut unitary = true;
    for m in lin.values() {
        let skew = (0..2 * n).all(|r| (0..2 * n).all(|c| (&m[r][c] + &m[c][r]).is_zero()));
        let comm = matsub(&matmul(m, &j0), &matmul(&j0, m))
            .iter()
            .flatten()
            .all(Rational::is_zero);
        unitary &= skew && comm;
    }
    let mut anti = true;
    for &a in &un {
        for &b in &un {
            let br = fields[a].bracket(&fields[b])?;
            let lhs = linear_part(&br);
            let comm = matsub(&matmul(&lin[&a], &lin[&b]), &matmul(&lin[&b], &lin[&a]));
            anti &= lhs.iter().flatten().zip(comm.iter().flatten()).all(|(u, v)| (u + v).is_zero());
        }
    }
    let flat: Vec<Vec<Rational>> = lin.values().map(|m| m.iter().flatten().cloned().collect()).collect();
    let rank_un = rank(&flat);

    Ok(IdealReport {
        is_ideal,
        quotient_closes,
        dilation_central,
        unitary_linear_parts: unitary,
        linear_parts_antihomomorphic: anti,
        dim_cr: d,
        dim_h,
        dim_quotient: d - dim_h,
        rank_un,
        witnesses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrResidual {
    /// `max |(£_Xη ∧ η)(∂_a, ∂_b)|`; zero iff `£_Xη ∝ η`
    pub contact: f64,
    /// `max |proj_D[X, ΦV] − Φ proj_D[X, V]|` over `V = proj_D ∂_k`
    pub j: f64,
}

impl CrResidual {
    pub fn max(&self) -> f64 {
        self.contact.max(self.j)
    }
}

/// Infinitesimal CR residuals of `x` for the structure `s` at `p`.
pub fn cr_residual<T: ContactMetric>(x: &PolyVectorField, s: &T, p: &[f64]) -> Result<CrResidual> {
    let d = p.len();
    check_dim(s.dim(), d)?;
    check_dim(x.dim(), d)?;
    let seeds = Jet2::seed(p);
    let xj = x.eval(&seeds);
    let eta_j = s.eta(&seeds);
    let xi_j = s.xi(&seeds);
    let phi_j = s.phi(&seeds);
    let eta = s.eta(p);
    let xi = s.xi(p);
    let phi = s.phi(p);

    let lie = crate::tensor::lie_derivative_form(x, &s.eta_field(), p)?;
    let mut contact: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            contact = contact.max((lie[a] * eta[b] - lie[b] * eta[a]).abs());
        }
    }

    // [X, W] at p from jets: X^j ∂_j W − W^j ∂_j X
    let bracket = |w: &[Jet2]| -> Vec<f64> {
        (0..d)
            .map(|k| {
                (0..d)
                    .map(|j| xj[j].value() * w[k].d(j) - w[j].value() * xj[k].d(j))
                    .sum()
            })
            .collect()
    };
    let proj = |v: &[f64]| -> Vec<f64> {
        let e: f64 = v.iter().zip(&eta).map(|(a, b)| a * b).sum();
        v.iter().zip(&xi).map(|(a, b)| a - e * b).collect()
    };
    let mut jres: f64 = 0.0;
    for k in 0..d {
        // V = ∂_k − η_k ξ as a jet-valued field
        let v: Vec<Jet2> = (0..d)
            .map(|a| {
                let unit = if a == k { 1.0 } else { 0.0 };
                Jet2::constant(unit) - eta_j[k] * xi_j[a]
            })
            .collect();
        let phiv: Vec<Jet2> = (0..d)
            .map(|a| (0..d).fold(Jet2::constant(0.0), |acc, b| acc + phi_j[a][b] * v[b]))
            .collect();
        let lhs = proj(&bracket(&phiv));
        let pv = proj(&bracket(&v));
        for a in 0..d {
            let rhs: f64 = (0..d).map(|b| phi[a][b] * pv[b]).sum();
            jres = jres.max((lhs[a] - rhs).abs());
        }
    }
    Ok(CrResidual { contact, j: jres })
}

/// Numeric flow of a polynomial field.
pub fn flow(x: &PolyVectorField, p0: &[f64], t: f64, opts: OdeOptions) -> Result<Vec<f64>> {
    Ok(flow_at(x, p0, &[t], opts)?.pop().unwrap())
}

/// Numeric flow sampled at the given times.
pub fn flow_at(x: &PolyVectorField, p0: &[f64], times: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>> {
    check_dim(x.dim(), p0.len())?;
    let cf = x.compile();
    integrate_at(|_, y, dy| cf.eval_into(y, dy), 0.0, p0, times, opts)
}

/// Closed-form flow of `X_12` (n ≥ 2): with `w_k = x_k + i y_k`,
/// `w_1 + w_2` turns as `e^{it}`, `w_1 − w_2` as `e^{−it}`, and `ż = Re(w_1 w_2)`.
pub fn x12_flow_closed(p0: &[f64], t: f64) -> Result<Vec<f64>> {
    if p0.len() < 5 || p0.len() % 2 == 0 {
        return Err(Error::InvalidParameter("X12 needs n ≥ 2".into()));
    }
    let n = p0.len() / 2;
    let (x1, x2, y1, y2) = (p0[0], p0[1], p0[n], p0[n + 1]);
    let (sr, si) = (x1 + x2, y1 + y2);
    let (dr, di) = (x1 - x2, y1 - y2);
    let (c, s) = (t.cos(), t.sin());
    let (s_r, s_i) = (sr * c - si * s, sr * s + si * c);
    let (d_r, d_i) = (dr * c + di * s, -dr * s + di * c);
    let mut out = p0.to_vec();
    out[0] = 0.5 * (s_r + d_r);
    out[1] = 0.5 * (s_r - d_r);
    out[n] = 0.5 * (s_i + d_i);
    out[n + 1] = 0.5 * (s_i - d_i);
    // ż = Re(s² − d²)/4 with s = s0 e^{it}, d = d0 e^{−it}
    let (s2r, s2i) = (sr * sr - si * si, 2.0 * sr * si);
    let (d2r, d2i) = (dr * dr - di * di, 2.0 * dr * di);
    let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
    // ∫ Re(A e^{2it}) = Re(A (e^{2it} − 1)/(2i)) = (Ar·sin2t + Ai·(cos2t − 1))/2
    let int_s = (s2r * s2 + s2i * (c2 - 1.0)) / 2.0;
    // ∫ Re(B e^{−2it}) = (Br·sin2t − Bi·(cos2t − 1))/2
    let int_d = (d2r * s2 - d2i * (c2 - 1.0)) / 2.0;
    out[2 * n] = p0[2 * n] + (int_s - int_d) / 4.0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::SasakiStructure;

    #[test]
    fn basis_sizes() {
        assert_eq!(basis(1).unwrap().len(), 5);
        assert_eq!(basis(2).unwrap().len(), 10);
        assert_eq!(basis(3).unwrap().len(), 17);
        assert!(basis(0).is_err());
        assert!(basis(5).is_err());
    }

    #[test]
    fn x11_matches_printed_form() {
        assert_eq!(x_field(1, 0, 0).to_string(), "-2*y1*∂x1 + 2*x1*∂y1 + (-y1^2 + x1^2)*∂z");
    }

    #[test]
    fn hamiltonian_examples() {
        let n = 1;
        let d = 3;
        assert_eq!(hamiltonian_field(&Poly::one(d), n).unwrap(), xi_field(n));
        assert_eq!(hamiltonian_field(&Poly::var(d, 0), n).unwrap(), s_field(n, 0));
        assert_eq!(hamiltonian_field(&-&Poly::var(d, 1), n).unwrap(), r_field(n, 0));
        let r2 = &(&Poly::var(d, 0) * &Poly::var(d, 0)) + &(&Poly::var(d, 1) * &Poly::var(d, 1));
        assert_eq!(hamiltonian_field(&r2, n).unwrap(), x_field(n, 0, 0));
    }

    #[test]
    fn hamiltonian_round_trip() {
        for n in 1..=3 {
            for b in basis(n).unwrap() {
                let f = hamiltonian(&b.field).unwrap();
                assert_eq!(hamiltonian_field(&f, n).unwrap(), b.field, "{}", b.tag);
            }
        }
    }

    #[test]
    fn named_brackets() {
        let sc = bracket_table(2).unwrap();
        let one = |t| {
            let mut v = vec![Rational::zero(); sc.dim()];
            v[sc.index(t).unwrap()] = int(1);
            v
        };
        let scale = |v: Vec<Rational>, c: i64| v.into_iter().map(|x| x * int(c)).collect::<Vec<_>>();
        assert_eq!(sc.bracket_tags(CrTag::R(0), CrTag::S(0)).unwrap(), one(CrTag::Xi));
        assert!(sc.bracket_tags(CrTag::R(0), CrTag::S(1)).unwrap().iter().all(Rational::is_zero));
        assert!(sc.bracket_tags(CrTag::Xi, CrTag::X(0, 1)).unwrap().iter().all(Rational::is_zero));
        assert_eq!(sc.bracket_tags(CrTag::Dil, CrTag::S(1)).unwrap(), scale(one(CrTag::S(1)), -1));
        assert_eq!(sc.bracket_tags(CrTag::X(0, 0), CrTag::R(0)).unwrap(), scale(one(CrTag::S(0)), -2));
        assert_eq!(sc.bracket_tags(CrTag::Dil, CrTag::Xi).unwrap(), scale(one(CrTag::Xi), -2));
        assert!(sc.bracket_tags(CrTag::Dil, CrTag::X(0, 0)).unwrap().iter().all(Rational::is_zero));
    }

    #[test]
    fn closure_failure_is_detected() {
        let b: Vec<PolyVectorField> = basis(1).unwrap().into_iter().map(|e| e.field).collect();
        let d = 3;
        let stray = PolyVectorField::from_pairs(1, vec![(0, Poly::var(d, 0))]);
        assert!(solve_in_span(&b, &stray).is_none());
    }

    #[test]
    fn ideal_and_quotient() {
        for n in 1..=3 {
            let r = verify_ideal(n).unwrap();
            assert!(r.ok(), "n = {}: {:?}", n, r);
            assert_eq!(r.dim_quotient, n * n + 1);
        }
    }

    #[test]
    fn non_cr_field_has_residual() {
        let s = SasakiStructure::right(1).unwrap();
        let x = PolyVectorField::from_pairs(1, vec![(0, Poly::var(3, 0))]);
        assert!(cr_residual(&x, &s, &[1.0, 1.0, 1.0]).unwrap().max() > 1e-3);
        let r = cr_residual(&dilation_field(1), &s, &[1.0, 1.0, 1.0]).unwrap();
        assert!(r.max() < 1e-12, "{:?}", r);
    }

    #[test]
    fn x12_closed_form_matches_integrator() {
        let p0 = [0.3, -0.5, 0.7, 0.2, 1.1];
        let x = x_field(2, 0, 1);
        for &t in &[0.5, 1.7, 4.0] {
            let num = flow(&x, &p0, t, OdeOptions::default()).unwrap();
            let cf = x12_flow_closed(&p0, t).unwrap();
            for (a, b) in num.iter().zip(&cf) {
                assert!((a - b).abs() < 1e-8, "t={} {:?} {:?}", t, num, cf);
            }
        }
    }
}
