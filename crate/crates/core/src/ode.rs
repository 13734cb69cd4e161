//! Dormand–Prince 5(4) with adaptive steps for complex linear systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step as a fraction of the interval length.
    pub initial_fraction: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-13, max_steps: 200_000, initial_fraction: 1e-3 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
pub fn dopri5<const N: usize>(
    f: impl Fn(f64, &[Complex64; N]) -> [Complex64; N],
    x0: f64,
    y0: [Complex64; N],
    x1: f64,
    ctl: &StepControl,
) -> Result<[Complex64; N]> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut h = span.abs() * ctl.initial_fraction;
    let min_h = 1e-14 * span.abs().max(x0.abs()).max(x1.abs());
    let mut x = x0;
    let mut y = y0;
    let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
    k[0] = f(x, &y);
    for _ in 0..ctl.max_steps {
        let remaining = (x1 - x) * dir;
        if remaining <= 0.0 {
            return Ok(y);
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h } * dir;
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                for (j, row) in k.iter().enumerate().take(s) {
                    *v += row[i] * (A[s][j] * step);
                }
            }
            k[s] = f(x + C[s] * step, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut inc = Complex64::new(0.0, 0.0);
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                inc += k[s][i] * B5[s];
                e += k[s][i] * E[s];
            }
            y_new[i] += inc * step;
            let scale = ctl.atol + ctl.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max((e * step).norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Stiffness { x, reason: "non-finite error estimate".into() });
        }
        if err <= 1.0 {
            x = if last { x1 } else { x + step };
            y = y_new;
            // First-same-as-last: the seventh stage is f at the new point.
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = step.abs() * factor;
        if h < min_h {
            return Err(Error::Stiffness { x, reason: format!("step size fell below {min_h:e}") });
        }
    }
    Err(Error::Stiffness { x, reason: format!("more than {} steps", ctl.max_steps) })
}
