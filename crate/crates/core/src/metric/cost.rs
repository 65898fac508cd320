//! The plan cost `Jᵠ(u, v)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::plan::TransportPlan;
use crate::kernel::PeakonState;
use crate::quadrature::{periodic_breaks, probes_for, sort_dedup, switch_roots, Rule};

/// Transported-mass term and excess-mass term of `Jᵠ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub transport: f64,
    pub excess: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.transport + self.excess
    }
}

impl std::ops::Add for CostBreakdown {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        CostBreakdown {
            transport: self.transport + o.transport,
            excess: self.excess + o.excess,
        }
    }
}

const SWITCHES: usize = 6;

struct Sample {
    transport: f64,
    excess: f64,
    switches: [f64; SWITCHES],
}

#[inline]
fn sample(u: &PeakonState, v: &PeakonState, x: f64, y: f64, slope: f64) -> Sample {
    let (uu, ux) = u.value(x);
    let (vv, vx) = v.value(y);
    let mu = 1.0 + ux * ux;
    let mv = (1.0 + vx * vx) * slope;
    let dtheta = 2.0 * (ux.atan() - vx.atan());
    let arc = dtheta.abs().min(2.0 * PI - dtheta.abs());
    let sum = (x - y).abs() + (uu - vv).abs() + arc;
    Sample {
        transport: sum.min(1.0) * mu.min(mv),
        excess: (mu - mv).abs(),
        switches: [mu - mv, x - y, uu - vv, dtheta, dtheta.abs() - PI, sum - 1.0],
    }
}

/// Cost of the linear piece `ψ: [xa, xb] → [ya, yb]`.
pub(crate) fn piece_cost(u: &PeakonState, v: &PeakonState, xa: f64, xb: f64, ya: f64, yb: f64) -> CostBreakdown {
    let slope = (yb - ya) / (xb - xa);
    let psi = |x: f64| ya + slope * (x - xa);
    let mut breaks = periodic_breaks(xa, xb, u.q.iter().copied());
    for y in periodic_breaks(ya, yb, v.q.iter().copied()) {
        if y > ya && y < yb {
            breaks.push(xa + (y - ya) / slope);
        }
    }
    sort_dedup(&mut breaks, 1e-13);
    let rule = Rule::standard();
    let mut out = CostBreakdown::default();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut pts = vec![a];
        // the same probe count for ψ and ψ⁻¹ on corresponding panels
        let probes = probes_for((b - a) * slope.max(1.0));
        pts.extend(switch_roots(a, b, probes, SWITCHES, |x, s| {
            s.copy_from_slice(&sample(u, v, x, psi(x), slope).switches)
        }));
        pts.push(b);
        for p in pts.windows(2) {
            for (x, wt) in rule.points(p[0], p[1]) {
                let s = sample(u, v, x, psi(x), slope);
                out.transport += wt * s.transport;
                out.excess += wt * s.excess;
            }
        }
    }
    out
}

/// `Jᵠ(u, v)` over the period starting at the plan's first breakpoint.
///
/// Panels are split at the peaks of `u`, at the preimages of the peaks of
/// `v`, at the plan breakpoints and at every sign change of the quantities
/// inside `min`, `|·|` and the cap, so the Gauss–Legendre rule only sees
/// smooth integrands.
pub fn transport_cost(u: &PeakonState, v: &PeakonState, psi: &TransportPlan) -> CostBreakdown {
    psi.pieces()
        .map(|(xa, xb, ya, yb)| piece_cost(u, v, xa, xb, ya, yb))
        .fold(CostBreakdown::default(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::energy;

    #[test]
    fn identical_profiles_cost_nothing() {
        let u = PeakonState::new(vec![0.7, -1.2, 2.0], vec![0.2, 0.6, 0.9]).unwrap();
        let c = transport_cost(&u, &u, &TransportPlan::identity());
        assert_eq!(c.total(), 0.0);
    }

    #[test]
    fn inversion_symmetry() {
        let u = PeakonState::new(vec![0.7, -1.2], vec![0.2, 0.6]).unwrap();
        let v = PeakonState::new(vec![1.5, 0.3, -0.4], vec![0.1, 0.45, 0.8]).unwrap();
        let psi = TransportPlan::new(vec![(0.05, 0.1), (0.5, 0.4), (0.7, 0.8)]).unwrap();
        let a = transport_cost(&u, &v, &psi).total();
        let b = transport_cost(&v, &u, &psi.inverse()).total();
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn single_peakon_against_zero_matches_riemann_sum() {
        let u = PeakonState::single(0.1, 0.5);
        let v = PeakonState::empty();
        let c = transport_cost(&u, &v, &TransportPlan::identity());
        let n = 100_000;
        let mut sum = 0.0;
        for k in 0..n {
            let x = (k as f64 + 0.5) / n as f64;
            let (uu, ux) = u.value(x);
            let mu = 1.0 + ux * ux;
            let d = (uu.abs() + 2.0 * ux.atan().abs()).min(1.0);
            sum += d * mu.min(1.0) + (mu - 1.0);
        }
        sum /= n as f64;
        assert!((c.total() - sum).abs() < 1e-8, "{} {sum}", c.total());
        // the excess term is ∫u_x² here
        assert!((c.excess - (energy(&u) - energy_l2(&u))).abs() < 1e-12);
    }

    fn energy_l2(u: &PeakonState) -> f64 {
        Rule::standard().integrate_panels(&u.breaks_from(0.0), |x| u.value(x).0.powi(2))
    }
}
