//! The periodic peakon kernel and quantities built from multipeakon profiles.
//!
//! A periodic peakon of strength `p` at `q` is `p·χ(x − q)` with
//!
//! ```text
//! χ(x) = Σₙ e^{-|x-n|} = (eˣ + e^{1-x}) / (e - 1),   x ∈ [0, 1],
//! ```
//!
//! extended 1-periodically. `χ` is even, has a single kink per period at the
//! integers, and solves `χ'' = χ` between kinks. All kernel arguments are
//! reduced into `[0, 1)` before the branch formula is applied.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{periodic_breaks, probes_for, switch_roots, Rule};

const E_MINUS_ONE: f64 = E - 1.0;

#[inline]
fn reduce(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can return 1.0 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `χ` on the branch `r ∈ [0, 1]`, no reduction.
#[inline]
pub fn chi_branch(r: f64) -> f64 {
    let er = r.exp();
    (er + E / er) / E_MINUS_ONE
}

/// `χ'` on the open branch `r ∈ (0, 1)`; at `r = 0` this is the right limit −1.
#[inline]
pub fn chi_prime_branch(r: f64) -> f64 {
    let er = r.exp();
    (er - E / er) / E_MINUS_ONE
}

/// `χ̃ = −χ'` on the branch.
#[inline]
pub fn chi_tilde_branch(r: f64) -> f64 {
    -chi_prime_branch(r)
}

/// The 1-periodic even kernel `χ`.
pub fn chi(x: f64) -> f64 {
    chi_branch(reduce(x))
}

/// `χ'`, 1-periodic and odd. At the integers (the kinks) the right limit −1 is
/// returned; use [`chi_prime_kink`] to learn whether that happened.
pub fn chi_prime(x: f64) -> f64 {
    chi_prime_branch(reduce(x))
}

/// `χ'(x)` together with a flag that is set when `x` is a kink (an integer).
pub fn chi_prime_kink(x: f64) -> (f64, bool) {
    let r = reduce(x);
    (chi_prime_branch(r), r == 0.0)
}

/// `χ̃(x) = (−eˣ + e^{1−x})/(e − 1)` after reduction into `[0, 1)`.
pub fn chi_tilde(x: f64) -> f64 {
    chi_tilde_branch(reduce(x))
}

/// Strengths and positions of `N` periodic peakons on the unit circle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakonState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl PeakonState {
    /// Validated state in canonical form: positions reduced into `[0, 1)`,
    /// sorted ascending and pairwise distinct.
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let s = Self::raw(p, q)?.canonical();
        for w in s.q.windows(2) {
            if w[1] - w[0] <= 0.0 {
                return Err(Error::InvalidState(format!(
                    "coincident positions at {}",
                    w[0]
                )));
            }
        }
        Ok(s)
    }

    /// Checks lengths and finiteness only; keeps the given order and does not
    /// reduce positions.
    pub fn raw(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::InvalidState(format!(
                "{} strengths but {} positions",
                p.len(),
                q.len()
            )));
        }
        if p.iter().chain(&q).any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        Ok(PeakonState { p, q })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(p: f64, q: f64) -> Self {
        PeakonState {
            p: vec![p],
            q: vec![reduce(q)],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Positions reduced into `[0, 1)` and sorted, strengths permuted along.
    pub fn canonical(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        let red: Vec<f64> = self.q.iter().map(|&q| reduce(q)).collect();
        idx.sort_by(|&a, &b| red[a].total_cmp(&red[b]));
        PeakonState {
            p: idx.iter().map(|&i| self.p[i]).collect(),
            q: idx.iter().map(|&i| red[i]).collect(),
        }
    }

    /// `Σ pᵢ`.
    pub fn momentum(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Every position shifted by `dx` (mod 1).
    pub fn translated(&self, dx: f64) -> Self {
        PeakonState {
            p: self.p.clone(),
            q: self.q.iter().map(|&q| reduce(q + dx)).collect(),
        }
        .canonical()
    }

    pub fn scaled(&self, c: f64) -> Self {
        PeakonState {
            p: self.p.iter().map(|p| c * p).collect(),
            q: self.q.clone(),
        }
    }

    /// `(u(x), u_x(x))`, right-limit convention for `u_x` at a peak.
    #[inline]
    pub fn value(&self, x: f64) -> (f64, f64) {
        let mut u = 0.0;
        let mut ux = 0.0;
        for (&p, &q) in self.p.iter().zip(&self.q) {
            let r = reduce(x - q);
            let er = r.exp();
            let ei = E / er;
            u += p * (er + ei);
            ux += p * (er - ei);
        }
        (u / E_MINUS_ONE, ux / E_MINUS_ONE)
    }

    /// Breakpoints of one period `[a, a + 1]` split at every peak.
    pub fn breaks_from(&self, a: f64) -> Vec<f64> {
        periodic_breaks(a, a + 1.0, self.q.iter().copied())
    }
}

/// A point of a profile with its slope angle on the circle of length 2π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub u: f64,
    pub ux: f64,
    pub theta: f64,
}

/// `u = Σ pᵢ χ(x − qᵢ)`, `u_x` with the right-limit convention at peaks and
/// `θ = 2 arctan u_x`.
pub fn eval_profile(s: &PeakonState, x: f64) -> ProfilePoint {
    let (u, ux) = s.value(x);
    ProfilePoint {
        x,
        u,
        ux,
        theta: 2.0 * ux.atan(),
    }
}

/// `E = ∫₀¹ (u² + u_x²) dx` by panel quadrature split at every peak.
pub fn energy(s: &PeakonState) -> f64 {
    energy_with(s, Rule::standard())
}

pub fn energy_with(s: &PeakonState, rule: &Rule) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    rule.integrate_panels(&s.breaks_from(0.0), |x| {
        let (u, ux) = s.value(x);
        u * u + ux * ux
    })
}

/// `‖u‖_{H¹}` over one period.
pub fn h1_norm(s: &PeakonState) -> f64 {
    energy(s).sqrt()
}

fn joint_breaks(a: &PeakonState, b: &PeakonState) -> Vec<f64> {
    periodic_breaks(0.0, 1.0, a.q.iter().chain(&b.q).copied())
}

/// `‖u − v‖_{H¹}` over one period.
pub fn h1_distance(a: &PeakonState, b: &PeakonState) -> f64 {
    let breaks = joint_breaks(a, b);
    Rule::standard()
        .integrate_panels(&breaks, |x| {
            let (u, ux) = a.value(x);
            let (v, vx) = b.value(x);
            (u - v).powi(2) + (ux - vx).powi(2)
        })
        .max(0.0)
        .sqrt()
}

/// `‖u − v‖_{L¹}` over one period; panels are additionally split where the
/// profiles cross.
pub fn l1_distance(a: &PeakonState, b: &PeakonState) -> f64 {
    let breaks = joint_breaks(a, b);
    let rule = Rule::standard();
    let diff = |x: f64| a.value(x).0 - b.value(x).0;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let mut pts = vec![w[0]];
        pts.extend(switch_roots(w[0], w[1], probes_for(w[1] - w[0]), 1, |x, out| out[0] = diff(x)));
        pts.push(w[1]);
        total += rule.integrate_panels(&pts, |x| diff(x).abs());
    }
    total
}

/// Breakpoints of the convolution window `[x − 1, x]`.
fn source_breaks(s: &PeakonState, x: f64) -> Vec<f64> {
    periodic_breaks(x - 1.0, x, s.q.iter().copied())
}

/// `P(x) = ½ ∫_{x−1}^{x} χ(x − y) (u² + u_x²/2)(y) dy`.
pub fn source_p(s: &PeakonState, x: f64) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    0.5 * Rule::standard().integrate_panels(&source_breaks(s, x), |y| {
        let (u, ux) = s.value(y);
        chi_branch(x - y) * (u * u + 0.5 * ux * ux)
    })
}

/// `P_x(x) = ½ ∫_{x−1}^{x} χ'(x − y) (u² + u_x²/2)(y) dy`.
pub fn source_px(s: &PeakonState, x: f64) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    0.5 * Rule::standard().integrate_panels(&source_breaks(s, x), |y| {
        let (u, ux) = s.value(y);
        chi_prime_branch(x - y) * (u * u + 0.5 * ux * ux)
    })
}
