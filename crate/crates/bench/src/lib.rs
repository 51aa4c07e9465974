//! Shared inputs for the benchmarks.

use heiscr_core::sampling::ball_points;

/// Fixed sample points in the ball of radius 1.5.
pub fn points(n: usize, count: usize) -> Vec<Vec<f64>> {
    ball_points(n, count, 1.5, 42)
}
