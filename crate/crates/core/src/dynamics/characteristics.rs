//! Characteristic curves and the pointwise equation residual.

use super::evolve::Trajectory;
use super::ode::{solve, Tolerance};
use crate::error::{Error, Result};
use crate::kernel::{chi, chi_prime, source_px, PeakonState};
use crate::quadrature::Rule;

const TOL: Tolerance = Tolerance { rel: 1e-11, abs: 1e-13 };

fn event_free(traj: &Trajectory, a: f64, b: f64) -> Result<()> {
    match traj.event_between(a, b) {
        Some(e) => Err(Error::EventInWindow {
            from: a.min(b),
            to: a.max(b),
            event: e.tau,
        }),
        None => Ok(()),
    }
}

/// `ξ(s2)` for `ξ' = u(t, ξ)`, `ξ(s) = x`. The result is not reduced mod 1.
pub fn characteristic_flow(traj: &Trajectory, s: f64, s2: f64, x: f64) -> Result<f64> {
    Ok(characteristic_flow_many(traj, s, s2, &[x])?[0])
}

/// [`characteristic_flow`] for many starting points, integrated together.
pub fn characteristic_flow_many(traj: &Trajectory, s: f64, s2: f64, xs: &[f64]) -> Result<Vec<f64>> {
    event_free(traj, s, s2)?;
    for t in [s, s2] {
        if t < traj.t_start() || t > traj.t_end() {
            return Err(Error::OutOfRange(t));
        }
    }
    let f = |t: f64, y: &[f64], dy: &mut [f64]| {
        let st = traj.state_at(t)?;
        for (d, &x) in dy.iter_mut().zip(y) {
            *d = st.value(x).0;
        }
        Ok(())
    };
    solve(f, s, xs, s2, TOL, 0.05)
}

/// Aligns `b` to the peakon order of `a` by the cyclic shift that minimises
/// the wrapped position differences. Returns `(dp, dq)` per peakon of `a`.
fn aligned_difference(a: &PeakonState, b: &PeakonState) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::InvalidState("peakon count changed inside the stencil".into()));
    }
    let wrap = |d: f64| d - d.round();
    let mut best = (f64::INFINITY, 0);
    for shift in 0..n {
        let cost: f64 = (0..n).map(|i| wrap(b.q[(i + shift) % n] - a.q[i]).abs()).sum();
        if cost < best.0 {
            best = (cost, shift);
        }
    }
    let k = best.1;
    Ok((
        (0..n).map(|i| b.p[(i + k) % n] - a.p[i]).collect(),
        (0..n).map(|i| wrap(b.q[(i + k) % n] - a.q[i])).collect(),
    ))
}

/// `‖u_t + u u_x + P_x‖_{L²}` over one period at time `t`.
///
/// `u_t` is evaluated from the peakon ansatz, `u_t = Σ ṗᵢ χ(x − qᵢ) − pᵢ q̇ᵢ χ'(x − qᵢ)`,
/// with `ṗ, q̇` from centred differences of the trajectory with step `dt`.
/// The stencil must not contain a collision.
pub fn residual_check(traj: &Trajectory, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    event_free(traj, t - dt, t + dt)?;
    let s = traj.state_at(t)?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let lo = traj.state_at(t - dt)?;
    let hi = traj.state_at(t + dt)?;
    let (dpl, dql) = aligned_difference(&s, &lo)?;
    let (dph, dqh) = aligned_difference(&s, &hi)?;
    let pdot: Vec<f64> = dph.iter().zip(&dpl).map(|(h, l)| (h - l) / (2.0 * dt)).collect();
    let qdot: Vec<f64> = dqh.iter().zip(&dql).map(|(h, l)| (h - l) / (2.0 * dt)).collect();
    let r = |x: f64| {
        let mut ut = 0.0;
        for i in 0..s.len() {
            ut += pdot[i] * chi(x - s.q[i]) - s.p[i] * qdot[i] * chi_prime(x - s.q[i]);
        }
        let (u, ux) = s.value(x);
        ut + u * ux + source_px(&s, x)
    };
    let sq = Rule::standard().integrate_panels(&s.breaks_from(0.0), |x| r(x).powi(2));
    Ok(sq.max(0.0).sqrt())
}
