//! Adaptive Dormand–Prince 5(4) integrator.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-11,
            atol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights equal the last row of A; E = b5 − b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to each of `times` (monotone in the
/// direction of travel), returning the states at those times.
pub fn integrate_at<F>(mut f: F, t0: f64, y0: &[f64], times: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let d = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut out = Vec::with_capacity(times.len());
    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut y5 = vec![0.0; d];
    let mut h = opts.h_init;
    let mut steps = 0usize;
    f(t, &y, &mut k[0]);

    for &target in times {
        let dir = if target >= t { 1.0 } else { -1.0 };
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepUnderflow { t });
            }
            let remaining = (target - t).abs();
            let mut last = false;
            let mut step = h.min(remaining);
            if step >= remaining * (1.0 - 1e-12) {
                step = remaining;
                last = true;
            }
            let hs = step * dir;
            for s in 1..7 {
                for i in 0..d {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += hs * A[s][j] * kj[i];
                    }
                    tmp[i] = acc;
                }
                f(t + C[s] * hs, &tmp, &mut k[s]);
            }
            // the 7th stage was evaluated at y5 (FSAL)
            y5.copy_from_slice(&tmp);
            let mut err: f64 = 0.0;
            for i in 0..d {
                let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * hs;
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                let r = (e / sc).abs();
                err = if r.is_nan() { f64::NAN } else { err.max(r) };
            }
            if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("integrator state".into()));
            }
            if err <= 1.0 {
                t = if last { target } else { t + hs };
                y.copy_from_slice(&y5);
                let k6 = k[6].clone();
                k[0].copy_from_slice(&k6);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    h = step * fac;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < opts.h_min {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Integrate `y' = f(t, y)` from `t0` to `t1`.
pub fn integrate<F>(f: F, t0: f64, y0: &[f64], t1: f64, opts: OdeOptions) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    Ok(integrate_at(f, t0, y0, &[t1], opts)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_returns_after_period() {
        let y = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            2.0 * std::f64::consts::PI,
            OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn outputs_at_requested_times() {
        let ts = [0.5, 1.0, 2.0];
        let ys = integrate_at(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], &ts, OdeOptions::default()).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.exp()).abs() < 1e-9 * t.exp());
        }
    }

    #[test]
    fn backward_integration() {
        let y = integrate(|_, y, dy| dy[0] = y[0], 1.0, &[1.0], 0.0, OdeOptions::default()).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn blow_up_reports_underflow() {
        // y' = y², y(0) = 1 blows up at t = 1
        let r = integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], 2.0, OdeOptions::default());
        assert!(r.is_err(), "{:?}", r);
    }
}
