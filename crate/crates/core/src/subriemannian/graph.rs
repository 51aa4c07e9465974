//! Lattice-graph distance oracle, independent of the ODE code.
//!
//! Vertices: `x_i, y_i ∈ hℤ`, `z ∈ (h²/2)ℤ` inside the box, `h = 2·w/R`.
//! CC edges move one block `(x_i, y_i)` by `h·(a, b)` along a straight line
//! and lift it horizontally; the exact z-change `(y_i + b h/2)·a h` is again
//! a multiple of `h²/2`, so the lattice is closed under these moves. In
//! penalized mode an extra constant vertical drift `e` is allowed along the
//! move, costing `√(h²(a² + b²) + L e²)`, plus pure vertical jumps.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{cc_distance_closed, BoxDomain, DistanceEstimate, DistanceMethod, DistanceMode};
use crate::error::{Error, Result};

const DIRS: [(i64, i64); 16] = [
    (1, 0),
    (2, 1),
    (1, 1),
    (1, 2),
    (0, 1),
    (-1, 2),
    (-1, 1),
    (-2, 1),
    (-1, 0),
    (-2, -1),
    (-1, -1),
    (-1, -2),
    (0, -1),
    (1, -2),
    (1, -1),
    (2, -1),
];

/// Worst-case length excess of a 16-direction polygon over a straight
/// chord: `1/cos(θ/2) − 1` for the widest angular gap `θ = atan(1/2)`.
pub const DIRECTION_EXCESS: f64 = 0.027_486_296_746_015_66;

const MAX_VERTICES: usize = 40_000_000;

#[derive(Clone, Debug)]
pub struct Lattice {
    pub n: usize,
    pub resolution: usize,
    pub h: f64,
    pub dz: f64,
    /// horizontal indices run over `−half..=half`
    pub half: i64,
    /// vertical indices run over `−zhalf..=zhalf`
    pub zhalf: i64,
}

impl Lattice {
    pub fn new(n: usize, resolution: usize, domain: &BoxDomain) -> Result<Self> {
        if resolution < 8 || resolution % 2 == 1 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be even and at least 8, got {}",
                resolution
            )));
        }
        let half = (resolution / 2) as i64;
        let h = domain.half_width / half as f64;
        let dz = h * h / 2.0;
        let zhalf = (domain.half_height / dz * (1.0 + 1e-12)).floor() as i64;
        let side = (2 * half + 1) as f64;
        let count = side.powi(2 * n as i32) * (2 * zhalf + 1) as f64;
        if count > MAX_VERTICES as f64 {
            return Err(Error::InvalidParameter(format!(
                "lattice would have {:.3e} vertices; lower the resolution",
                count
            )));
        }
        Ok(Lattice {
            n,
            resolution,
            h,
            dz,
            half,
            zhalf,
        })
    }

    pub fn num_vertices(&self) -> usize {
        let side = (2 * self.half + 1) as usize;
        side.pow(2 * self.n as u32) * (2 * self.zhalf + 1) as usize
    }

    /// Nearest lattice vertex (as integer indices).
    pub fn snap(&self, p: &[f64]) -> Vec<i64> {
        let n = self.n;
        let mut v: Vec<i64> = p[..2 * n]
            .iter()
            .map(|c| ((c / self.h).round() as i64).clamp(-self.half, self.half))
            .collect();
        v.push(((p[2 * n] / self.dz).round() as i64).clamp(-self.zhalf, self.zhalf));
        v
    }

    pub fn point(&self, v: &[i64]) -> Vec<f64> {
        let n = self.n;
        let mut p: Vec<f64> = v[..2 * n].iter().map(|c| *c as f64 * self.h).collect();
        p.push(v[2 * n] as f64 * self.dz);
        p
    }

    fn index(&self, v: &[i64]) -> usize {
        let side = 2 * self.half + 1;
        let mut id: i64 = 0;
        for c in &v[..2 * self.n] {
            id = id * side + (c + self.half);
        }
        (id * (2 * self.zhalf + 1) + v[2 * self.n] + self.zhalf) as usize
    }

    fn coords(&self, mut id: usize, out: &mut [i64]) {
        let zs = (2 * self.zhalf + 1) as usize;
        out[2 * self.n] = (id % zs) as i64 - self.zhalf;
        id /= zs;
        let side = (2 * self.half + 1) as usize;
        for k in (0..2 * self.n).rev() {
            out[k] = (id % side) as i64 - self.half;
            id /= side;
        }
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

/// Per-move vertical drifts allowed in penalized mode, in units of `dz`.
const DRIFTS: [i64; 7] = [0, 1, -1, 2, -2, 4, -4];

/// Search order. `Goal` is A* towards a single target with a lower bound on
/// the remaining distance (closed-form CC distance in CC mode, horizontal
/// displacement in penalized mode); both are consistent, so the returned
/// value is the same graph shortest path as plain Dijkstra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    Dijkstra,
    Goal,
}

fn heuristic(lat: &Lattice, v: &[i64], t: &[f64], mode: DistanceMode) -> f64 {
    let p = lat.point(v);
    match mode {
        DistanceMode::Cc => cc_distance_closed(&p, t).map(|d| d * (1.0 - 1e-9)).unwrap_or(0.0),
        DistanceMode::Riemannian(_) => {
            let n = lat.n;
            let s: f64 = (0..2 * n).map(|k| (p[k] - t[k]).powi(2)).sum();
            s.sqrt() * (1.0 - 1e-12)
        }
    }
}

fn dijkstra(lat: &Lattice, src: &[i64], targets: &[Vec<i64>], mode: DistanceMode, search: Search) -> Vec<f64> {
    let goal = match (search, targets) {
        (Search::Goal, [t]) => Some(lat.point(t)),
        _ => None,
    };
    let est = |w: &[i64]| goal.as_ref().map_or(0.0, |t| heuristic(lat, w, t, mode));
    let n = lat.n;
    let nv = lat.num_vertices();
    let mut dist = vec![f64::INFINITY; nv];
    let want: Vec<usize> = targets.iter().map(|t| lat.index(t)).collect();
    let mut remaining = want.len();
    let mut found = vec![false; want.len()];
    let s = lat.index(src);
    dist[s] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item(est(src), s));
    let mut v = vec![0i64; 2 * n + 1];
    let mut w = vec![0i64; 2 * n + 1];
    let h = lat.h;
    let l = match mode {
        DistanceMode::Cc => None,
        DistanceMode::Riemannian(l) => Some(l),
    };
    let mut vertical = Vec::new();
    if l.is_some() {
        let mut k = 1i64;
        while k <= 2 * lat.zhalf {
            vertical.push(k);
            vertical.push(-k);
            k *= 2;
        }
    }
    let mut closed = vec![false; nv];
    while let Some(Item(_, id)) = heap.pop() {
        if closed[id] {
            continue;
        }
        closed[id] = true;
        let d = dist[id];
        for (t, &wi) in want.iter().enumerate() {
            if wi == id && !found[t] {
                found[t] = true;
                remaining -= 1;
            }
        }
        if remaining == 0 {
            break;
        }
        lat.coords(id, &mut v);
        let relax = |w: &[i64], cost: f64, dist: &mut Vec<f64>, heap: &mut BinaryHeap<Item>| {
            let j = lat.index(w);
            let nd = d + cost;
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Item(nd + est(w), j));
            }
        };
        for i in 0..n {
            for &(a, b) in &DIRS {
                let xi = v[i] + a;
                let yi = v[n + i] + b;
                if xi.abs() > lat.half || yi.abs() > lat.half {
                    continue;
                }
                // (y + b h/2)·a h = (2 y_idx a + a b)·h²/2
                let chord = 2 * v[n + i] * a + a * b;
                let base = h * ((a * a + b * b) as f64).sqrt();
                let drifts: &[i64] = if l.is_some() { &DRIFTS } else { &DRIFTS[..1] };
                for &e in drifts {
                    let zk = v[2 * n] + chord + e;
                    if zk.abs() > lat.zhalf {
                        continue;
                    }
                    w.copy_from_slice(&v);
                    w[i] = xi;
                    w[n + i] = yi;
                    w[2 * n] = zk;
                    let cost = match l {
                        None => base,
                        Some(l) => {
                            let ez = e as f64 * lat.dz;
                            (base * base + l * ez * ez).sqrt()
                        }
                    };
                    relax(&w, cost, &mut dist, &mut heap);
                }
            }
        }
        if let Some(l) = l {
            for &k in &vertical {
                let zk = v[2 * n] + k;
                if zk.abs() > lat.zhalf {
                    continue;
                }
                w.copy_from_slice(&v);
                w[2 * n] = zk;
                relax(&w, l.sqrt() * (k as f64 * lat.dz).abs(), &mut dist, &mut heap);
            }
        }
    }
    want.iter().map(|&i| dist[i]).collect()
}

fn check_point(n: usize, p: &[f64]) -> Result<()> {
    if p.len() != 2 * n + 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * n + 1,
            got: p.len(),
        });
    }
    Ok(())
}

/// Distances from `p` to each of `targets`, all snapped to the lattice.
pub fn graph_distances_from(p: &[f64], targets: &[Vec<f64>], resolution: usize, mode: DistanceMode, domain: &BoxDomain) -> Result<Vec<f64>> {
    graph_search(p, targets, resolution, mode, domain, Search::Goal)
}

pub fn graph_search(
    p: &[f64],
    targets: &[Vec<f64>],
    resolution: usize,
    mode: DistanceMode,
    domain: &BoxDomain,
    search: Search,
) -> Result<Vec<f64>> {
    mode.check()?;
    let n = p.len() / 2;
    check_point(n, p)?;
    domain.check(p)?;
    for q in targets {
        check_point(n, q)?;
        domain.check(q)?;
    }
    let lat = Lattice::new(n, resolution, domain)?;
    let ts: Vec<Vec<i64>> = targets.iter().map(|q| lat.snap(q)).collect();
    let d = dijkstra(&lat, &lat.snap(p), &ts, mode, search);
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Disconnected);
    }
    Ok(d)
}

/// Graph estimate with its error bracket. The value is an upper bound on the
/// distance between the snapped vertices. The bracket widens it by the CC
/// distance from each endpoint to its vertex, by the direction excess and,
/// on the lower side, by one lattice step `h` for routing through vertices.
pub fn dist_graph(p: &[f64], q: &[f64], resolution: usize, mode: DistanceMode, domain: &BoxDomain) -> Result<DistanceEstimate> {
    let value = graph_distances_from(p, &[q.to_vec()], resolution, mode, domain)?[0];
    let n = p.len() / 2;
    let lat = Lattice::new(n, resolution, domain)?;
    let snap_err = cc_distance_closed(p, &lat.point(&lat.snap(p)))? + cc_distance_closed(q, &lat.point(&lat.snap(q)))?;
    let lower = (value / (1.0 + DIRECTION_EXCESS) - snap_err - lat.h).max(0.0);
    Ok(DistanceEstimate {
        value,
        method: DistanceMethod::Graph,
        bracket: Some((lower, value + snap_err)),
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_excess_constant() {
        let th = 0.5f64.atan();
        assert!((1.0 / (th / 2.0).cos() - 1.0 - DIRECTION_EXCESS).abs() < 1e-15);
    }

    #[test]
    fn index_roundtrip() {
        let lat = Lattice::new(1, 8, &BoxDomain::default()).unwrap();
        let mut c = vec![0; 3];
        for id in [0, 17, lat.num_vertices() - 1] {
            lat.coords(id, &mut c);
            assert_eq!(lat.index(&c), id);
        }
    }

    #[test]
    fn coarse_values() {
        let b = BoxDomain::default();
        let o = [0.0; 3];
        let d = dist_graph(&o, &[1.0, 0.0, 0.0], 16, DistanceMode::Cc, &b).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        assert_eq!(dist_graph(&o, &o, 16, DistanceMode::Cc, &b).unwrap().value, 0.0);
        assert!(dist_graph(&o, &[0.0, 0.0, 3.0], 16, DistanceMode::Cc, &b).is_err());
        assert!(dist_graph(&o, &[1.0, 0.0, 0.0], 7, DistanceMode::Cc, &b).is_err());
    }

    #[test]
    fn goal_search_agrees_with_dijkstra() {
        let b = BoxDomain::default();
        let o = [0.0; 3];
        for q in [[0.0, 0.0, 1.0], [0.5, -0.25, 0.75], [-1.0, 0.5, -0.3]] {
            for mode in [DistanceMode::Cc, DistanceMode::Riemannian(5.0)] {
                let a = graph_search(&o, &[q.to_vec()], 16, mode, &b, Search::Dijkstra).unwrap()[0];
                let g = graph_search(&o, &[q.to_vec()], 16, mode, &b, Search::Goal).unwrap()[0];
                assert!((a - g).abs() < 1e-12, "{:?} {} {}", q, a, g);
            }
        }
    }

    #[test]
    fn penalized_below_cc() {
        let b = BoxDomain::default();
        let o = [0.0; 3];
        let q = [0.5, 0.0, 0.5];
        let cc = dist_graph(&o, &q, 16, DistanceMode::Cc, &b).unwrap().value;
        let mut prev = 0.0;
        for l in [1.0, 10.0, 100.0] {
            let d = dist_graph(&o, &q, 16, DistanceMode::Riemannian(l), &b).unwrap().value;
            assert!(d >= prev - 1e-12 && d <= cc + 1e-12);
            prev = d;
        }
    }
}
