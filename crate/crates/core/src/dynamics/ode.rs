//! Dormand–Prince 5(4) embedded Runge–Kutta steps with cubic Hermite dense
//! output.

use crate::error::{Error, Result};

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
// fifth-order weights are the last row of A; E = b5 - b4
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

pub struct Step {
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    /// Weighted RMS error estimate; the step is acceptable when `≤ 1`.
    pub err: f64,
}

/// One Dormand–Prince step of signed size `h` from `(t, y)` with `dy = f(t, y)`.
pub fn dp45_step<F>(f: &mut F, t: f64, y: &[f64], dy: &[f64], h: f64, tol: Tolerance) -> Result<Step>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(dy.to_vec());
    let mut tmp = vec![0.0; n];
    for s in 1..7 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += A[s][j] * kj[i];
            }
            tmp[i] = y[i] + h * acc;
        }
        let mut ks = vec![0.0; n];
        f(t + C[s] * h, &tmp, &mut ks)?;
        k.push(ks);
    }
    // stage 7 was evaluated at the fifth-order solution (FSAL)
    let y_new = tmp;
    let mut err = 0.0;
    for i in 0..n {
        let mut e = 0.0;
        for (s, ks) in k.iter().enumerate() {
            e += ERR[s] * ks[i];
        }
        let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
        err += (h * e / scale).powi(2);
    }
    let err = if n == 0 { 0.0 } else { (err / n as f64).sqrt() };
    let err = if err.is_nan() { f64::INFINITY } else { err };
    Ok(Step {
        y: y_new,
        dy: k.pop().unwrap(),
        err,
    })
}

/// Step-size factor from an error estimate.
pub fn step_factor(err: f64, accepted: bool) -> f64 {
    if err == 0.0 {
        return 5.0;
    }
    let f = 0.9 * err.powf(-0.2);
    if accepted {
        f.clamp(0.2, 5.0)
    } else {
        f.clamp(0.1, 0.9)
    }
}

/// Cubic Hermite interpolation of component data on `[t0, t1]`.
pub fn hermite(t0: f64, y0: &[f64], d0: &[f64], t1: f64, y1: &[f64], d1: &[f64], t: f64) -> Vec<f64> {
    let h = t1 - t0;
    if h == 0.0 {
        return y0.to_vec();
    }
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    (0..y0.len())
        .map(|i| h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i])
        .collect()
}

/// Adaptive integration of `y' = f(t, y)` from `t0` to `t1` (either
/// direction), returning `y(t1)`.
pub fn solve<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, tol: Tolerance, max_step: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0.to_vec());
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut dy = vec![0.0; y.len()];
    f(t, &y, &mut dy)?;
    let mut h = (1e-2 * span.abs()).min(max_step);
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(y);
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h };
        let step = dp45_step(&mut f, t, &y, &dy, dir * hs, tol);
        match step {
            Ok(st) if st.err <= 1.0 => {
                t = if last { t1 } else { t + dir * hs };
                y = st.y;
                dy = st.dy;
                h = (hs * step_factor(st.err, true)).min(max_step);
            }
            Ok(st) => h = hs * step_factor(st.err, false),
            Err(_) => h = 0.5 * hs,
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow(t));
        }
    }
}
