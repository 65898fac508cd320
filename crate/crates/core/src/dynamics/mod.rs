//! Time evolution of periodic multipeakon solutions.
//!
//! Between interactions the strengths and positions follow the Hamiltonian
//! flow of `H(p, q) = ½ Σᵢⱼ pᵢ pⱼ χ(qᵢ − qⱼ)`. When a peakon–antipeakon pair
//! closes in, the pair is moved to the rescaled chart `(z, w, η, ζ)` of
//! [`chart`], in which the collision at `w = π` is a regular point, and is
//! released again once it has separated.

mod chart;
mod characteristics;
mod evolve;
pub mod ode;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{chi, chi_branch, chi_prime_branch, PeakonState};

pub use chart::{from_rescaled, rhs_rescaled, to_rescaled, ChartDerivative, CollisionChart};
pub use characteristics::{characteristic_flow, characteristic_flow_many, residual_check};
pub use evolve::{
    detect_collision, detect_collisions, evolve, CollisionEvent, Regime, RegimeSpan, Trajectory,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Periodic gap below which an opposite-sign adjacent pair is a
    /// collision candidate.
    pub gap_threshold: f64,
    /// `|p_right − p_left|` above which the chart switch triggers.
    pub slope_threshold: f64,
    pub max_step: f64,
    /// The pair leaves the chart once `|w − π|` exceeds this margin (or its
    /// gap exceeds twice `gap_threshold`).
    pub chart_exit_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            gap_threshold: 1e-2,
            slope_threshold: 50.0,
            max_step: 0.05,
            chart_exit_margin: PI / 4.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("gap_threshold", self.gap_threshold),
            ("slope_threshold", self.slope_threshold),
            ("max_step", self.max_step),
            ("chart_exit_margin", self.chart_exit_margin),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.gap_threshold >= 0.5 {
            return Err(Error::InvalidConfig("gap_threshold must be below 0.5".into()));
        }
        if self.chart_exit_margin >= PI / 2.0 {
            return Err(Error::InvalidConfig("chart_exit_margin must be below pi/2".into()));
        }
        // a pair entering the chart must start inside the exit margin
        if PI - 2.0 * self.slope_threshold.atan() >= self.chart_exit_margin {
            return Err(Error::InvalidConfig(
                "slope_threshold too small for chart_exit_margin".into(),
            ));
        }
        Ok(())
    }

    /// Gap at which a pair in the chart is released.
    pub fn exit_gap(&self) -> f64 {
        2.0 * self.gap_threshold
    }
}

/// `(dp/dt, dq/dt)` of the periodic peakon system
///
/// ```text
/// q̇ᵢ = Σⱼ pⱼ χ(qᵢ − qⱼ),    ṗᵢ = −Σ_{j≠i} pᵢ pⱼ χ'(qᵢ − qⱼ).
/// ```
pub fn rhs_regular(s: &PeakonState) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = s.len();
    let mut dp = vec![0.0; n];
    let mut dq = vec![0.0; n];
    let c0 = chi(0.0);
    for i in 0..n {
        let mut field = s.p[i] * c0;
        let mut slope = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let r = (s.q[i] - s.q[j]).rem_euclid(1.0);
            if r == 0.0 || r >= 1.0 {
                return Err(Error::CollisionRequired(i.min(j), i.max(j)));
            }
            field += s.p[j] * chi_branch(r);
            slope += s.p[j] * chi_prime_branch(r);
        }
        dq[i] = field;
        dp[i] = -s.p[i] * slope;
    }
    Ok((dp, dq))
}

/// `H = ½ Σᵢ Σⱼ pᵢ pⱼ χ(qᵢ − qⱼ)`. For multipeakon profiles `E = 4H`.
pub fn hamiltonian(s: &PeakonState) -> f64 {
    let n = s.len();
    let mut h = 0.0;
    for i in 0..n {
        for j in 0..n {
            h += s.p[i] * s.p[j] * chi(s.q[i] - s.q[j]);
        }
    }
    0.5 * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::energy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_peakon_is_a_traveling_wave() {
        let (dp, dq) = rhs_regular(&PeakonState::single(1.0, 0.3)).unwrap();
        assert_eq!(dp, vec![0.0]);
        assert!((dq[0] - 2.163953).abs() < 1e-6);
    }

    #[test]
    fn antisymmetric_pair() {
        let s = PeakonState::new(vec![1.0, -1.0], vec![0.4, 0.6]).unwrap();
        let (dp, dq) = rhs_regular(&s).unwrap();
        assert!((dq[0] + dq[1]).abs() < 1e-13);
        assert!((dp[0] + dp[1]).abs() < 1e-13);
        assert!(dp[0] > 0.0);
    }

    #[test]
    fn coincident_positions_need_a_chart() {
        let s = PeakonState::raw(vec![1.0, -1.0], vec![0.25, 1.25]).unwrap();
        assert!(matches!(rhs_regular(&s), Err(Error::CollisionRequired(0, 1))));
    }

    #[test]
    fn momentum_rate_vanishes_and_energy_is_four_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s = PeakonState::new(p, q).unwrap();
            let (dp, _) = rhs_regular(&s).unwrap();
            assert!(dp.iter().sum::<f64>().abs() < 1e-14);
            let h = hamiltonian(&s);
            assert!((energy(&s) - 4.0 * h).abs() < 1e-11 * (1.0 + h.abs()));
        }
    }

    #[test]
    fn hamiltonian_examples() {
        assert!((hamiltonian(&PeakonState::single(1.0, 0.2)) - 1.081977).abs() < 1e-6);
        let s = PeakonState::new(vec![1.0, -1.0], vec![0.0, 0.5]).unwrap();
        let direct = 0.5 * (2.0 * chi(0.0) - 2.0 * chi(0.5));
        assert!((hamiltonian(&s) - direct).abs() < 1e-15);
        assert!((hamiltonian(&s) - 0.244919).abs() < 1e-6);
        let t = PeakonState::new(vec![0.5, -1.5, 0.9], vec![0.1, 0.5, 0.8]).unwrap();
        assert!((hamiltonian(&t) - hamiltonian(&t.translated(0.3))).abs() < 1e-13);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { slope_threshold: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { gap_threshold: 0.6, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
