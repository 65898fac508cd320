//! Candidate plans: cumulative-mass matching and characteristic transport.

use super::mass::Cumulative;
use super::cost::transport_cost;
use super::plan::TransportPlan;
use crate::dynamics::{characteristic_flow_many, Trajectory};
use crate::error::Result;
use crate::kernel::PeakonState;

const ANCHOR_BREAKPOINTS: usize = 16;
const ANCHOR_SCAN: usize = 48;
const ANCHOR_GOLDEN: usize = 30;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of `f` on `[a, b]`; returns `(x, f(x))`.
pub(crate) fn golden<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, iters: usize, mut f: F) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Monotone plan matching the cumulative lifted masses,
/// `ψ(x) = M_v⁻¹((T_v/T_u)·M_u(x) + c)`, with breakpoints at `grid` equal
/// mass levels of `u`.
///
/// The offset `c` (the circle anchor) is chosen to minimise the plan cost
/// `Jᵠ` of a coarse version of the plan: a scan over one period of `c`
/// followed by golden-section refinement.
pub fn plan_cdf_match(u: &PeakonState, v: &PeakonState, grid: usize) -> TransportPlan {
    let grid = grid.max(2);
    let cu = Cumulative::new(u);
    let cv = Cumulative::new(v);
    let (tu, tv) = (cu.total(), cv.total());
    let r = tv / tu;
    let build = |c: f64, n: usize| {
        let points = (0..n)
            .map(|k| {
                let m = tu * k as f64 / n as f64;
                (cu.inverse(m), cv.inverse(r * m + c))
            })
            .collect();
        TransportPlan::new(points).expect("cumulative inverses are strictly increasing")
    };
    let cost = |c: f64| transport_cost(u, v, &build(c, ANCHOR_BREAKPOINTS)).total();
    let step = tv / ANCHOR_SCAN as f64;
    let (mut best_c, mut best) = (0.0, f64::INFINITY);
    for k in 0..ANCHOR_SCAN {
        let c = -0.5 * tv + step * k as f64;
        let d = cost(c);
        if d < best {
            best = d;
            best_c = c;
        }
    }
    let (c, d) = golden(best_c - step, best_c + step, ANCHOR_GOLDEN, cost);
    if d < best {
        best_c = c;
    }
    build(best_c, grid)
}

/// Pushes `psi0` forward along the characteristics of both solutions:
/// `ψ_t(ξ_u(t, y)) = ξ_v(t, ψ₀(y))`, sampled at `grid` breakpoints.
/// Fails if either trajectory has a collision between 0 and `t`.
pub fn plan_characteristic(
    traj_u: &Trajectory,
    traj_v: &Trajectory,
    psi0: &TransportPlan,
    t: f64,
    grid: usize,
) -> Result<TransportPlan> {
    let base = psi0.refined(grid);
    let xs = characteristic_flow_many(traj_u, 0.0, t, base.xs())?;
    let ys = characteristic_flow_many(traj_v, 0.0, t, base.ys())?;
    TransportPlan::new(xs.into_iter().zip(ys).collect())
}
