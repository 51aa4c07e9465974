//! Levi-Civita connection and curvature of a metric field at a point.
//!
//! Conventions:
//! `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`,
//! `R(∂_j,∂_k)∂_i = R^l_{ijk} ∂_l` with
//! `R^l_{ijk} = ∂_jΓ^l_{ki} − ∂_kΓ^l_{ji} + Γ^l_{jm}Γ^m_{ki} − Γ^l_{km}Γ^m_{ji}`,
//! `Ric_bc = R^j_{cjb}` and `s = g^{bc} Ric_bc`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::forms::MetricField;
use super::jet::Jet2;
use crate::error::{check_dim, Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub dim: usize,
    pub metric: Vec<Vec<f64>>,
    pub inverse_metric: Vec<Vec<f64>>,
    /// `Γ^k_ij` stored at `[k][i][j]`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// `R^l_ijk` stored flat at `((l·d + i)·d + j)·d + k`.
    pub riemann: Vec<f64>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
    /// Max-abs cyclic sum `R^l_ijk + R^l_jki + R^l_kij`, relative to `max(1, |R|_∞)`.
    pub bianchi_residual: f64,
}

impl CurvatureReport {
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.christoffel[k][i][j]
    }

    pub fn riemann(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim;
        self.riemann[((l * d + i) * d + j) * d + k]
    }

    /// `g(R(u,v)w, t)`.
    pub fn riemann_4(&self, u: &[f64], v: &[f64], w: &[f64], t: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for l in 0..d {
            let gt: f64 = (0..d).map(|m| self.metric[l][m] * t[m]).sum();
            if gt == 0.0 {
                continue;
            }
            for i in 0..d {
                if w[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    if u[j] == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        acc += self.riemann(l, i, j, k) * w[i] * u[j] * v[k] * gt;
                    }
                }
            }
        }
        acc
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += self.metric[i][j] * u[i] * v[j];
            }
        }
        acc
    }

    /// Sectional curvature `g(R(u,v)v,u) / (|u|²|v|² − g(u,v)²)`.
    pub fn sectional(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim, u.len())?;
        check_dim(self.dim, v.len())?;
        let uu = self.inner(u, u);
        let vv = self.inner(v, v);
        let uv = self.inner(u, v);
        let den = uu * vv - uv * uv;
        if den <= 1e-12 * (uu * vv).max(f64::MIN_POSITIVE) {
            return Err(Error::DegeneratePlane(den));
        }
        Ok(self.riemann_4(u, v, v, u) / den)
    }

    /// Max-abs of `R^l_ijk + R^l_ikj` (antisymmetry in the last pair).
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut m: f64 = 0.0;
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        m = m.max((self.riemann(l, i, j, k) + self.riemann(l, i, k, j)).abs());
                    }
                }
            }
        }
        m
    }
}

/// Christoffel symbols and their first derivatives from a jet-valued metric.
struct Connection {
    ginv: Vec<Vec<f64>>,
    gamma: Vec<Vec<Vec<f64>>>,
    /// `∂_m Γ^k_ij` at `[m][k][i][j]`.
    dgamma: Vec<Vec<Vec<Vec<f64>>>>,
}

fn invert(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = g.len();
    let mat = DMatrix::from_fn(d, d, |i, j| 0.5 * (g[i][j] + g[j][i]));
    let chol = nalgebra::linalg::Cholesky::new(mat).ok_or(Error::SingularMetric)?;
    let inv = chol.inverse();
    Ok((0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect())
}

fn connection(gj: &[Vec<Jet2>]) -> Result<Connection> {
    let d = gj.len();
    let g: Vec<Vec<f64>> = gj.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    let ginv = invert(&g)?;

    // first-kind symbols Γ_lij and ∂_m Γ_lij
    let mut low = vec![vec![vec![0.0; d]; d]; d];
    let mut dlow = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                low[l][i][j] = 0.5 * (gj[j][l].d(i) + gj[i][l].d(j) - gj[i][j].d(l));
                for m in 0..d {
                    dlow[m][l][i][j] =
                        0.5 * (gj[j][l].dd(i, m) + gj[i][l].dd(j, m) - gj[i][j].dd(l, m));
                }
            }
        }
    }

    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let mut dginv = vec![vec![vec![0.0; d]; d]; d];
    for m in 0..d {
        let mut tmp = vec![vec![0.0; d]; d];
        for k in 0..d {
            for b in 0..d {
                tmp[k][b] = (0..d).map(|a| ginv[k][a] * gj[a][b].d(m)).sum();
            }
        }
        for k in 0..d {
            for l in 0..d {
                dginv[m][k][l] = -(0..d).map(|b| tmp[k][b] * ginv[b][l]).sum::<f64>();
            }
        }
    }

    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    let mut dgamma = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                gamma[k][i][j] = (0..d).map(|l| ginv[k][l] * low[l][i][j]).sum();
                for m in 0..d {
                    dgamma[m][k][i][j] = (0..d)
                        .map(|l| dginv[m][k][l] * low[l][i][j] + ginv[k][l] * dlow[m][l][i][j])
                        .sum();
                }
            }
        }
    }
    Ok(Connection {
        ginv,
        gamma,
        dgamma,
    })
}

/// Full curvature data of `g` at `p`.
pub fn curvature<G: MetricField>(g: &G, p: &[f64]) -> Result<CurvatureReport> {
    check_dim(g.dim(), p.len())?;
    let d = p.len();
    let gj = g.components(&Jet2::seed(p));
    check_dim(d, gj.len())?;
    for row in &gj {
        check_dim(d, row.len())?;
        if !row.iter().all(Jet2::is_finite) {
            return Err(Error::NonFinite("metric jets".into()));
        }
    }
    let conn = connection(&gj)?;
    let Connection {
        ginv,
        gamma,
        dgamma,
    } = conn;

    let mut riemann = vec![0.0; d * d * d * d];
    let idx = |l: usize, i: usize, j: usize, k: usize| ((l * d + i) * d + j) * d + k;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = dgamma[j][l][k][i] - dgamma[k][l][j][i];
                    for m in 0..d {
                        v += gamma[l][j][m] * gamma[m][k][i] - gamma[l][k][m] * gamma[m][j][i];
                    }
                    riemann[idx(l, i, j, k)] = v;
                }
            }
        }
    }

    let mut ricci = vec![vec![0.0; d]; d];
    for b in 0..d {
        for c in 0..d {
            ricci[b][c] = (0..d).map(|j| riemann[idx(j, c, j, b)]).sum();
        }
    }
    let mut scalar = 0.0;
    for b in 0..d {
        for c in 0..d {
            scalar += ginv[b][c] * ricci[b][c];
        }
    }

    let rmax = riemann.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut bianchi: f64 = 0.0;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let s = riemann[idx(l, i, j, k)] + riemann[idx(l, j, k, i)] + riemann[idx(l, k, i, j)];
                    bianchi = bianchi.max(s.abs());
                }
            }
        }
    }

    let metric = gj.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    Ok(CurvatureReport {
        dim: d,
        metric,
        inverse_metric: ginv,
        christoffel: gamma,
        riemann,
        ricci,
        scalar,
        bianchi_residual: bianchi / rmax,
    })
}

/// Sectional curvature of `span(u, v)` for `g` at `p`.
pub fn sectional<G: MetricField>(g: &G, p: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    curvature(g, p)?.sectional(u, v)
}

/// Christoffel symbols by central differences of the metric (step `h`);
/// independent of the jet pipeline, used as a test oracle.
pub fn christoffel_fd<G: MetricField>(g: &G, p: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let d = p.len();
    check_dim(g.dim(), d)?;
    let g0 = g.components(p);
    let ginv = invert(&g0)?;
    // dg[m][i][j] = ∂_m g_ij
    let mut dg = vec![vec![vec![0.0; d]; d]; d];
    for m in 0..d {
        let mut pp = p.to_vec();
        let mut pm = p.to_vec();
        pp[m] += h;
        pm[m] -= h;
        let gp = g.components(&pp);
        let gm = g.components(&pm);
        for i in 0..d {
            for j in 0..d {
                dg[m][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                gamma[k][i][j] = (0..d)
                    .map(|l| 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    Ok(gamma)
}
