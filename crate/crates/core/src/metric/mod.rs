//! The transport distance `J` between multipeakon profiles.
//!
//! A profile `u` is lifted to the measure with density `1 + u_x²` on the
//! curve `x ↦ (x, u(x), 2 arctan u_x(x))` in `ℝ × ℝ × T`. For a transport
//! plan `ψ` the cost `Jᵠ(u, v)` charges the capped distance `d⋄` for the
//! transported mass and `|(1 + u_x²) − (1 + v_x²∘ψ) ψ'|` for the excess.
//! `J` is the infimum over plans; this module reports it as a pair of
//! certified bounds.

mod bounds;
mod cost;
mod mass;
mod optimize;
mod plan;
mod seeds;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kernel::PeakonState;

pub use bounds::{arctan_gap_bound, lipschitz_constant, lower_bound_l1, upper_bound_h1};
pub use cost::{transport_cost, CostBreakdown};
pub use mass::Cumulative;
pub use optimize::{descent_history, optimize_plan, OptimizeOptions};
pub use plan::TransportPlan;
pub use seeds::{plan_cdf_match, plan_characteristic};

const TWO_PI: f64 = 2.0 * PI;

/// A point of `ℝ × ℝ × T`; `theta` is kept in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub x: f64,
    pub u: f64,
    pub theta: f64,
}

impl LiftedPoint {
    pub fn new(x: f64, u: f64, theta: f64) -> Self {
        LiftedPoint {
            x,
            u,
            theta: theta.rem_euclid(TWO_PI),
        }
    }

    /// `(x, u(x), 2 arctan u_x(x))`.
    pub fn of_profile(s: &PeakonState, x: f64) -> Self {
        let (u, ux) = s.value(x);
        Self::new(x, u, 2.0 * ux.atan())
    }
}

/// Shorter arc length between two angles.
#[inline]
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// `(|x − x̃| + |u − ũ| + |θ − θ̃|_*) ∧ 1`.
pub fn d_diamond(a: &LiftedPoint, b: &LiftedPoint) -> f64 {
    ((a.x - b.x).abs() + (a.u - b.u).abs() + arc_distance(a.theta, b.theta)).min(1.0)
}

/// Transported fractions `(φ₁(x), φ₂(ψ(x)))`.
pub fn phi_pair(u: &PeakonState, v: &PeakonState, psi: &TransportPlan, x: f64) -> (f64, f64) {
    let mu = 1.0 + u.value(x).1.powi(2);
    let mv = (1.0 + v.value(psi.eval(x)).1.powi(2)) * psi.slope(x);
    let ratio = mv / mu;
    (ratio.min(1.0), (1.0 / ratio).min(1.0))
}

/// Certified bounds on `J(u, v)` and the plan that achieves the upper one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub upper: f64,
    pub lower: f64,
    pub best_plan: TransportPlan,
    pub breakdown: CostBreakdown,
    /// Index of the seed the best plan descends from.
    pub seed: usize,
    /// Cost of every seed after optimisation, in seed order.
    pub seed_costs: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_examples() {
        let a = LiftedPoint::new(0.0, 0.0, 0.1);
        assert_eq!(d_diamond(&a, &a), 0.0);
        assert_eq!(d_diamond(&a, &LiftedPoint::new(0.5, 2.0, PI)), 1.0);
        let b = LiftedPoint::new(0.0, 0.0, TWO_PI - 0.1);
        assert!((d_diamond(&a, &b) - 0.2).abs() < 1e-15);
        let c = LiftedPoint::new(0.0, 0.0, -0.1);
        assert!((c.theta - (TWO_PI - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn phi_balance() {
        let u = PeakonState::new(vec![0.7, -1.2], vec![0.2, 0.6]).unwrap();
        let v = PeakonState::new(vec![1.5], vec![0.45]).unwrap();
        let psi = TransportPlan::new(vec![(0.0, 0.1), (0.5, 0.4)]).unwrap();
        assert_eq!(phi_pair(&u, &u, &TransportPlan::identity(), 0.3), (1.0, 1.0));
        for k in 0..20 {
            let x = 0.013 + k as f64 / 20.0;
            let (p1, p2) = phi_pair(&u, &v, &psi, x);
            assert_eq!(p1.max(p2), 1.0);
            let mu = 1.0 + u.value(x).1.powi(2);
            let mv = (1.0 + v.value(psi.eval(x)).1.powi(2)) * psi.slope(x);
            assert!((p1 * mu - p2 * mv).abs() < 1e-12 * mu.max(mv));
        }
    }
}
