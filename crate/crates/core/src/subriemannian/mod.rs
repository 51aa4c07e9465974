//! Carnot–Carathéodory geometry of the right contact distribution
//! `D = ker(dz − y·dx)`, spanned by `V_i = ∂x_i + y_i∂z` and `U_i = ∂y_i`.
//!
//! Horizontal lengths are measured in the transverse metric
//! `g_T = Σ dx_i² + dy_i²` on `D`, in which `V_i, U_i` are orthonormal.
//! The penalized metrics are `g_L = g_T + L·η⊗η` (with `g_T` extended by
//! zero along `∂z`). Both `η = dz − y·dx` and `g_T` are invariant under
//! right translations, so all distances here are right-invariant.

mod graph;
mod shooting;

pub use graph::{dist_graph, graph_distances_from, graph_search, Lattice, Search, DIRECTION_EXCESS};
pub use shooting::{dist_shooting, geodesic_endpoint, shoot, Geodesic, ShootingOptions};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::heisenberg::{right_frame, Point};
use crate::tensor::forms::MetricField;
use crate::tensor::jet::Scalar;

/// Which length structure a distance refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DistanceMode {
    Cc,
    /// `g_L` with the given `L > 0`.
    Riemannian(f64),
}

impl DistanceMode {
    fn check(&self) -> Result<()> {
        match self {
            DistanceMode::Riemannian(l) if !(l.is_finite() && *l > 0.0) => {
                Err(Error::InvalidParameter(format!("penalty L must be positive, got {}", l)))
            }
            _ => Ok(()),
        }
    }

    /// `1/L`, zero in CC mode.
    pub fn inv_l(&self) -> f64 {
        match self {
            DistanceMode::Cc => 0.0,
            DistanceMode::Riemannian(l) => 1.0 / l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    Graph,
    Shooting,
    SegmentBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub method: DistanceMethod,
    pub bracket: Option<(f64, f64)>,
    /// set when shooting failed and the graph value was substituted
    pub fallback: bool,
}

impl DistanceEstimate {
    pub fn lower(&self) -> f64 {
        self.bracket.map(|b| b.0).unwrap_or(self.value)
    }
    pub fn upper(&self) -> f64 {
        self.bracket.map(|b| b.1).unwrap_or(self.value)
    }
}

/// Admissible region `|x_i|, |y_i| ≤ half_width`, `|z| ≤ half_height`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxDomain {
    pub half_width: f64,
    pub half_height: f64,
}

impl Default for BoxDomain {
    fn default() -> Self {
        BoxDomain {
            half_width: 2.0,
            half_height: 2.0,
        }
    }
}

impl BoxDomain {
    pub fn new(half_width: f64, half_height: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_height > 0.0 && half_width.is_finite() && half_height.is_finite()) {
            return Err(Error::InvalidParameter("box bounds must be positive".into()));
        }
        Ok(BoxDomain {
            half_width,
            half_height,
        })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let d = p.len();
        p[..d - 1].iter().all(|v| v.abs() <= self.half_width * (1.0 + 1e-12))
            && p[d - 1].abs() <= self.half_height * (1.0 + 1e-12)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(format!("{:?} not in box {:?}", p, self)))
        }
    }

    /// The box mapped by the dilation `δ_λ`.
    pub fn dilate(&self, lambda: f64) -> BoxDomain {
        BoxDomain {
            half_width: self.half_width * lambda,
            half_height: self.half_height * lambda * lambda,
        }
    }
}

/// `g_L = g_T + L·η⊗η` for the right model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PenalizedMetric {
    pub n: usize,
    pub l: f64,
}

impl PenalizedMetric {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        DistanceMode::Riemannian(l).check()?;
        Ok(PenalizedMetric { n, l })
    }

    /// `g_L(v, v)` at `p`.
    pub fn norm_sq(&self, p: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        let e = v[2 * n] - (0..n).map(|i| p[n + i] * v[i]).sum::<f64>();
        v[..2 * n].iter().map(|c| c * c).sum::<f64>() + self.l * e * e
    }
}

impl MetricField for PenalizedMetric {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }
    fn components<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        let n = self.n;
        let d = 2 * n + 1;
        let mut eta = vec![S::zero(); d];
        for i in 0..n {
            eta[i] = p[n + i].clone() * -1.0;
        }
        eta[2 * n] = S::one();
        let mut g = vec![vec![S::zero(); d]; d];
        for a in 0..d {
            for b in 0..d {
                let mut v = eta[a].clone() * eta[b].clone() * self.l;
                if a == b && a < 2 * n {
                    v = v + 1.0;
                }
                g[a][b] = v;
            }
        }
        g
    }
}

/// A horizontal curve on `[0, 1]`: controls sampled on a uniform grid and
/// interpolated linearly, with the lifted states at the grid points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizontalPath {
    pub n: usize,
    pub controls: Vec<Vec<f64>>,
    pub states: Vec<Vec<f64>>,
}

/// Integrate `ẋ = u_x, ẏ = u_y, ż = y·u_x` for piecewise-linear controls.
/// Exact: `y·u_x` is cubic on each cell and is integrated by Simpson's rule.
pub fn lift(controls: &[Vec<f64>], p0: &[f64]) -> Result<HorizontalPath> {
    if controls.len() < 2 {
        return Err(Error::InvalidParameter("need at least two control samples".into()));
    }
    let d = p0.len();
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidParameter("start point must have odd length 2n+1".into()));
    }
    let n = d / 2;
    check_finite(p0, "start point")?;
    for u in controls {
        check_dim(2 * n, u.len())?;
        check_finite(u, "controls")?;
    }
    let h = 1.0 / (controls.len() - 1) as f64;
    let mut states = vec![p0.to_vec()];
    let mut s = p0.to_vec();
    for w in controls.windows(2) {
        s = step(n, &s, &w[0], &w[1], h);
        states.push(s.clone());
    }
    Ok(HorizontalPath {
        n,
        controls: controls.to_vec(),
        states,
    })
}

fn step(n: usize, s: &[f64], u0: &[f64], u1: &[f64], h: f64) -> Vec<f64> {
    let mut out = s.to_vec();
    let mut dz = 0.0;
    for i in 0..n {
        let (ux0, ux1) = (u0[i], u1[i]);
        let (uy0, uy1) = (u0[n + i], u1[n + i]);
        let y0 = s[n + i];
        let ym = y0 + uy0 * h / 2.0 + (uy1 - uy0) * h / 8.0;
        let y1 = y0 + h * (uy0 + uy1) / 2.0;
        let uxm = (ux0 + ux1) / 2.0;
        dz += h / 6.0 * (y0 * ux0 + 4.0 * ym * uxm + y1 * ux1);
        out[i] = s[i] + h * (ux0 + ux1) / 2.0;
        out[n + i] = y1;
    }
    out[2 * n] = s[2 * n] + dz;
    out
}

impl HorizontalPath {
    pub fn start(&self) -> &[f64] {
        &self.states[0]
    }

    pub fn endpoint(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// Largest mismatch between consecutive states and the exact lift of
    /// the controls; zero for an untouched [`lift`] output.
    pub fn horizontal_residual(&self) -> f64 {
        let h = 1.0 / (self.controls.len() - 1) as f64;
        let mut r: f64 = 0.0;
        for k in 0..self.controls.len() - 1 {
            let want = step(self.n, &self.states[k], &self.controls[k], &self.controls[k + 1], h);
            for (a, b) in want.iter().zip(&self.states[k + 1]) {
                r = r.max((a - b).abs());
            }
        }
        r
    }
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
];

/// `∫ |u| dt` in `g_T`; refuses paths whose horizontal residual exceeds `tol`.
pub fn cc_length(path: &HorizontalPath, tol: f64) -> Result<f64> {
    let r = path.horizontal_residual();
    if !(r <= tol) {
        return Err(Error::InvalidParameter(format!(
            "path is not horizontal: residual {:e} > {:e}",
            r, tol
        )));
    }
    let h = 1.0 / (path.controls.len() - 1) as f64;
    let mut len = 0.0;
    for w in path.controls.windows(2) {
        for (x, wt) in GAUSS5 {
            let s = (x + 1.0) / 2.0;
            let sp: f64 = w[0]
                .iter()
                .zip(&w[1])
                .map(|(a, b)| {
                    let u = a + s * (b - a);
                    u * u
                })
                .sum();
            len += wt * h / 2.0 * sp.sqrt();
        }
    }
    Ok(len)
}

/// `q·p⁻¹`; the CC and `g_L` distances satisfy `d(p, q) = d(0, q·p⁻¹)`.
pub fn relative(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    check_dim(p.len(), q.len())?;
    let pp = Point::from_flat(p)?;
    let qq = Point::from_flat(q)?;
    Ok(qq.mul(&pp.inv())?.to_flat())
}

/// Solve `(θ − sin θ)/(8 sin²(θ/2)) = m` for `θ ∈ [0, 2π)`.
fn solve_turning(m: f64) -> f64 {
    let mu = |t: f64| {
        if t < 1e-4 {
            t / 12.0 + t * t * t / 720.0
        } else {
            let s = (t / 2.0).sin();
            (t - t.sin()) / (8.0 * s * s)
        }
    };
    let (mut lo, mut hi) = (0.0, 2.0 * std::f64::consts::PI);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mu(mid) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact CC distance. The minimizers are circular arcs in a complex line
/// spanned by the horizontal displacement; the turning angle is fixed by the
/// enclosed area `|z − x·y/2|` relative to the squared chord.
pub fn cc_distance_closed(p: &[f64], q: &[f64]) -> Result<f64> {
    let r = relative(p, q)?;
    let n = r.len() / 2;
    let chord2: f64 = r[..2 * n].iter().map(|v| v * v).sum();
    let xy: f64 = (0..n).map(|i| r[i] * r[n + i]).sum();
    let area = (r[2 * n] - xy / 2.0).abs();
    if chord2 == 0.0 {
        return Ok(2.0 * (std::f64::consts::PI * area).sqrt());
    }
    let chord = chord2.sqrt();
    let theta = solve_turning(area / chord2);
    if theta < 1e-8 {
        return Ok(chord);
    }
    Ok(theta * chord / (2.0 * (theta / 2.0).sin()))
}

/// Upper bound from an explicit curve: the closed-form minimizer in CC mode,
/// the better of the straight coordinate segment and the horizontal minimizer
/// followed by nothing in penalized mode.
pub fn segment_bound(p: &[f64], q: &[f64], mode: DistanceMode) -> Result<DistanceEstimate> {
    mode.check()?;
    let cc = cc_distance_closed(p, q)?;
    let value = match mode {
        DistanceMode::Cc => cc,
        DistanceMode::Riemannian(l) => {
            let r = relative(p, q)?;
            let n = r.len() / 2;
            let g = PenalizedMetric::new(n, l)?;
            let mut len = 0.0;
            let zero = vec![0.0; r.len()];
            for (x, wt) in GAUSS5 {
                let s = (x + 1.0) / 2.0;
                let pt: Vec<f64> = zero.iter().zip(&r).map(|(a, b)| a + s * b).collect();
                len += wt / 2.0 * g.norm_sq(&pt, &r).sqrt();
            }
            len.min(cc)
        }
    };
    Ok(DistanceEstimate {
        value,
        method: DistanceMethod::SegmentBound,
        bracket: None,
        fallback: false,
    })
}

/// Shooting with graph fallback on divergence.
pub fn distance(
    p: &[f64],
    q: &[f64],
    mode: DistanceMode,
    domain: &BoxDomain,
    resolution: usize,
    opts: &ShootingOptions,
) -> Result<DistanceEstimate> {
    domain.check(p)?;
    domain.check(q)?;
    match dist_shooting(p, q, mode, opts) {
        Ok(d) => Ok(d),
        Err(Error::ShootingDiverged { .. }) => {
            let mut g = dist_graph(p, q, resolution, mode, domain)?;
            g.fallback = true;
            Ok(g)
        }
        Err(e) => Err(e),
    }
}

/// Numeric rank of `{V_i, U_i, [V_i, U_j]}` at `p`.
pub fn bracket_rank(n: usize, p: &[f64]) -> Result<usize> {
    Ok(rank_of(n, p, true)?)
}

/// Numeric rank of `{V_i, U_i}` alone (always `2n`).
pub fn horizontal_rank(n: usize, p: &[f64]) -> Result<usize> {
    rank_of(n, p, false)
}

fn rank_of(n: usize, p: &[f64], brackets: bool) -> Result<usize> {
    let d = 2 * n + 1;
    check_dim(d, p.len())?;
    let frames: Vec<_> = (0..n).map(|i| right_frame(n, i)).collect();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (v, u) in &frames {
        cols.push(v.eval(p));
        cols.push(u.eval(p));
    }
    if brackets {
        for (v, _) in &frames {
            for (_, u) in &frames {
                cols.push(v.bracket(u)?.eval(p));
            }
        }
    }
    let m = DMatrix::from_fn(d, cols.len(), |r, c| cols[c][r]);
    Ok(m.rank(1e-10))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub l: f64,
    pub d_l: f64,
    pub gap: f64,
    pub solver_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub d_cc: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `d_L` non-decreasing along the schedule (within `slack`)
    pub monotone: bool,
    /// `d_L ≤ d_cc` on every row (within `slack`)
    pub bounded: bool,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,d_L,gap\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.12},{:.12}\n", r.l, r.d_l, r.gap));
        }
        s
    }
}

/// `d_{g_L}(p, q)` by shooting along an increasing `L` schedule, against the
/// CC distance.
pub fn convergence_table(p: &[f64], q: &[f64], schedule: &[f64], opts: &ShootingOptions, slack: f64) -> Result<ConvergenceTable> {
    if schedule.is_empty() || schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("L schedule must be non-empty and increasing".into()));
    }
    let d_cc = dist_shooting(p, q, DistanceMode::Cc, opts)?.value;
    let mut rows = Vec::with_capacity(schedule.len());
    for &l in schedule {
        let mode = DistanceMode::Riemannian(l);
        mode.check()?;
        let (d_l, ok) = match dist_shooting(p, q, mode, opts) {
            Ok(d) => (d.value, true),
            Err(Error::ShootingDiverged { .. }) => (segment_bound(p, q, mode)?.value, false),
            Err(e) => return Err(e),
        };
        rows.push(ConvergenceRow {
            l,
            d_l,
            gap: d_cc - d_l,
            solver_ok: ok,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].d_l >= w[0].d_l - slack);
    let bounded = rows.iter().all(|r| r.d_l <= d_cc + slack);
    Ok(ConvergenceTable {
        d_cc,
        rows,
        monotone,
        bounded,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub lambda: f64,
    pub base: f64,
    pub scaled: f64,
    pub ratio: f64,
}

fn dilate(p: &[f64], lambda: f64) -> Vec<f64> {
    let d = p.len();
    let mut v: Vec<f64> = p.iter().map(|c| c * lambda).collect();
    v[d - 1] = p[d - 1] * lambda * lambda;
    v
}

/// `d_cc(δ_λp, δ_λq) / d_cc(p, q)` by shooting.
pub fn homogeneity_check(lambda: f64, p: &[f64], q: &[f64], opts: &ShootingOptions) -> Result<HomogeneityReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("dilation factor must be positive".into()));
    }
    let base = dist_shooting(p, q, DistanceMode::Cc, opts)?.value;
    let scaled = dist_shooting(&dilate(p, lambda), &dilate(q, lambda), DistanceMode::Cc, opts)?.value;
    Ok(HomogeneityReport {
        lambda,
        base,
        scaled,
        ratio: scaled / base,
    })
}

/// Same ratio from the lattice graph, the scaled pair measured in the
/// dilated box.
pub fn homogeneity_check_graph(lambda: f64, p: &[f64], q: &[f64], resolution: usize, domain: &BoxDomain) -> Result<HomogeneityReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("dilation factor must be positive".into()));
    }
    let base = dist_graph(p, q, resolution, DistanceMode::Cc, domain)?.value;
    let scaled = dist_graph(
        &dilate(p, lambda),
        &dilate(q, lambda),
        resolution,
        DistanceMode::Cc,
        &domain.dilate(lambda),
    )?
    .value;
    Ok(HomogeneityReport {
        lambda,
        base,
        scaled,
        ratio: scaled / base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lift_examples() {
        let c = vec![vec![1.0, 0.0]; 11];
        let p = lift(&c, &[0.0; 3]).unwrap();
        let e = p.endpoint();
        assert!((e[0] - 1.0).abs() < 1e-14 && e[1] == 0.0 && e[2] == 0.0);
        assert!((cc_length(&p, 1e-12).unwrap() - 1.0).abs() < 1e-14);

        let z = lift(&vec![vec![0.0, 0.0]; 5], &[0.3, 0.2, 0.1]).unwrap();
        assert_eq!(z.endpoint(), &[0.3, 0.2, 0.1]);
        assert_eq!(cc_length(&z, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn circle_lift_encloses_area() {
        // unit-speed circle of length ℓ: z gain ∮ y dx = ℓ²/(4π)
        let m = 2000;
        let l = 2.0;
        let c: Vec<Vec<f64>> = (0..=m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                vec![-l * t.sin(), -l * t.cos()]
            })
            .collect();
        let p = lift(&c, &[0.0; 3]).unwrap();
        let e = p.endpoint();
        assert!(e[0].abs() < 1e-5 && e[1].abs() < 1e-5);
        assert!((e[2] - l * l / (4.0 * PI)).abs() < 1e-5, "{:?}", e);
        assert!((cc_length(&p, 1e-12).unwrap() - l).abs() < 1e-5);
    }

    #[test]
    fn tampered_path_is_refused() {
        let mut p = lift(&vec![vec![1.0, 1.0]; 5], &[0.0; 3]).unwrap();
        p.states[2][2] += 0.1;
        assert!(cc_length(&p, 1e-9).is_err());
    }

    #[test]
    fn closed_form_values() {
        let o = [0.0; 3];
        assert!((cc_distance_closed(&o, &[1.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((cc_distance_closed(&o, &[0.0, 0.0, 1.0]).unwrap() - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert_eq!(cc_distance_closed(&o, &o).unwrap(), 0.0);
        // half-circle: chord 2ρ, area πρ²/2, length πρ
        let rho: f64 = 0.7;
        let q = [2.0 * rho, 0.0, PI * rho * rho / 2.0];
        assert!((cc_distance_closed(&o, &q).unwrap() - PI * rho).abs() < 1e-9);
    }

    #[test]
    fn ranks() {
        for n in 1..=3 {
            let p: Vec<f64> = (0..2 * n + 1).map(|k| 0.3 * k as f64 - 0.5).collect();
            assert_eq!(bracket_rank(n, &p).unwrap(), 2 * n + 1);
            assert_eq!(horizontal_rank(n, &p).unwrap(), 2 * n);
        }
    }

    #[test]
    fn penalized_metric_vertical_length() {
        let g = PenalizedMetric::new(1, 4.0).unwrap();
        assert_eq!(g.norm_sq(&[0.0, 0.5, 0.0], &[0.0, 0.0, 1.0]), 4.0);
        assert!(PenalizedMetric::new(1, 0.0).is_err());
    }
}
