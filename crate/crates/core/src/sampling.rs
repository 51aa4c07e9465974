//! Seeded sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(r: &mut R) -> f64 {
    let u1: f64 = 1.0 - r.gen::<f64>();
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform point in the `d`-ball of the given radius.
pub fn ball_point<R: Rng>(r: &mut R, d: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(r)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let rad = radius * r.gen::<f64>().powf(1.0 / d as f64);
        return v.into_iter().map(|a| a * rad / norm).collect();
    }
}

/// `count` points in the ball of radius `radius` in ℝ^{2n+1}. The first
/// few lie on the z-axis (including the origin), where the moment map and
/// the deformation factor degenerate.
pub fn ball_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let d = 2 * n + 1;
    let mut r = rng(seed);
    let axis = (count / 10).clamp(usize::from(count > 0), 3);
    let mut out = Vec::with_capacity(count);
    for k in 0..axis {
        let mut p = vec![0.0; d];
        p[2 * n] = radius * k as f64 / axis as f64;
        out.push(p);
    }
    while out.len() < count {
        out.push(ball_point(&mut r, d, radius));
    }
    out
}

/// Random unit-free vector with standard normal entries.
pub fn gaussian_vector<R: Rng>(r: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| gaussian(r)).collect()
}
