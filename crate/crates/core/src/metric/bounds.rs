//! Norm-based bounds on `J`.

use std::f64::consts::PI;

use crate::kernel::{h1_distance, h1_norm, l1_distance, PeakonState};

/// `‖u − v‖_{L¹} / (2 (2 + ‖u‖_{H¹} + ‖v‖_{H¹}))`.
pub fn lower_bound_l1(u: &PeakonState, v: &PeakonState) -> f64 {
    l1_distance(u, v) / (2.0 * (2.0 + h1_norm(u) + h1_norm(v)))
}

/// `(8π + 3)(1 + ‖u‖_{H¹} + ‖v‖_{H¹}) ‖u − v‖_{H¹}`, a bound for the cost
/// of the identity plan.
pub fn upper_bound_h1(u: &PeakonState, v: &PeakonState) -> f64 {
    (8.0 * PI + 3.0) * (1.0 + h1_norm(u) + h1_norm(v)) * h1_distance(u, v)
}

/// Time-Lipschitz constant of `t ↦ u(t)` in `J` for a solution of energy `e`:
/// `2(1 + E) + E + (10E + 1) + 10E² + 10E`.
pub fn lipschitz_constant(e: f64) -> f64 {
    2.0 * (1.0 + e) + e + (10.0 * e + 1.0) + 10.0 * e * e + 10.0 * e
}

/// Both sides of `|arctan a − arctan b|·a² ≤ 4π(|a| + |b|)|a − b|`.
pub fn arctan_gap_bound(a: f64, b: f64) -> (f64, f64) {
    ((a.atan() - b.atan()).abs() * a * a, 4.0 * PI * (a.abs() + b.abs()) * (a - b).abs())
}
