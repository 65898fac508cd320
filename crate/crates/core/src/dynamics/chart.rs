//! Rescaled variables for a colliding peakon pair.
//!
//! For a pair with left member `(p₁, q₁)` and right member `(p₂, q₂)` the
//! chart coordinates are
//!
//! ```text
//! z = p₁ + p₂,  w = 2 arctan(p₂ − p₁) ∈ (0, 2π),  η = q₁ + q₂,  ζ = (p₂ − p₁)² (q₂ − q₁).
//! ```
//!
//! With `c = cot(w/2)` the gap is `d = ζ c²` and `p₂ − p₁ = 1/c`. A collision
//! is the crossing of `w = π`, where `c = 0`, `d = 0` and `ζ` equals the
//! energy concentrated at the collision point.
//!
//! The vector field below is the Hamiltonian peakon flow pushed through this
//! transform by the chain rule. The kernel differences that become
//! singular at `w = π` are rewritten exactly with the branch identities
//!
//! ```text
//! χ(y ∓ d/2) sums/differences = 2cosh(d/2) χ(y), ±2sinh(d/2) χ̃(y),
//! χ'(y ∓ d/2) sums/differences = −2cosh(d/2) χ̃(y), ∓2sinh(d/2) χ(y),
//! ```
//!
//! valid while `y ± d/2` stays on one branch, which leaves a field that is
//! smooth through the collision.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::kernel::{chi_branch, chi_prime_branch, chi_tilde_branch, PeakonState};

/// One colliding pair in rescaled variables plus the remaining peakons.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionChart {
    pub z: f64,
    pub w: f64,
    pub eta: f64,
    pub zeta: f64,
    pub spectators: PeakonState,
    /// Index of the left member in the state the chart was built from.
    pub pair_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartDerivative {
    pub dz: f64,
    pub dw: f64,
    pub deta: f64,
    pub dzeta: f64,
    pub dp: Vec<f64>,
    pub dq: Vec<f64>,
}

/// Builds the chart for the adjacent pair `(left, right)` of `s`. The right
/// member is unwrapped to lie within one period to the right of the left one.
pub fn to_rescaled(s: &PeakonState, left: usize, right: usize) -> Result<CollisionChart> {
    if left >= s.len() || right >= s.len() || left == right {
        return Err(Error::InvalidState(format!("bad pair ({left}, {right})")));
    }
    let gap = (s.q[right] - s.q[left]).rem_euclid(1.0);
    let (z, w, eta, zeta) = pair_to_chart(s.p[left], s.q[left], s.p[right], s.q[left] + gap)?;
    let others: Vec<usize> = (0..s.len()).filter(|&k| k != left && k != right).collect();
    Ok(CollisionChart {
        z,
        w,
        eta,
        zeta,
        spectators: PeakonState {
            p: others.iter().map(|&k| s.p[k]).collect(),
            q: others.iter().map(|&k| s.q[k]).collect(),
        },
        pair_index: left,
    })
}

/// Inverse of [`to_rescaled`]; the result is in canonical form.
pub fn from_rescaled(c: &CollisionChart) -> Result<PeakonState> {
    let [(p1, q1), (p2, q2)] = chart_to_pair(c.z, c.w, c.eta, c.zeta)?;
    let mut p = c.spectators.p.clone();
    let mut q = c.spectators.q.clone();
    p.extend([p1, p2]);
    q.extend([q1, q2]);
    Ok(PeakonState::raw(p, q)?.canonical())
}

/// Chart vector field; finite at `w = π`.
pub fn rhs_rescaled(c: &CollisionChart) -> Result<ChartDerivative> {
    let mut kinds = vec![Kind::Pair];
    kinds.extend(std::iter::repeat_n(Kind::Single, c.spectators.len()));
    let sys = System::new(kinds);
    let mut y = vec![c.z, c.w, c.eta, c.zeta];
    for (&p, &q) in c.spectators.p.iter().zip(&c.spectators.q) {
        y.extend([p, q]);
    }
    let mut dy = vec![0.0; y.len()];
    sys.rhs(&y, &mut dy)?;
    Ok(ChartDerivative {
        dz: dy[0],
        dw: dy[1],
        deta: dy[2],
        dzeta: dy[3],
        dp: dy[4..].chunks(2).map(|c| c[0]).collect(),
        dq: dy[4..].chunks(2).map(|c| c[1]).collect(),
    })
}

pub(crate) fn pair_to_chart(p1: f64, q1: f64, p2: f64, q2: f64) -> Result<(f64, f64, f64, f64)> {
    let delta = p2 - p1;
    if delta == 0.0 {
        return Err(Error::InvalidState("chart undefined for equal strengths".into()));
    }
    let mut w = 2.0 * delta.atan();
    if w < 0.0 {
        w += 2.0 * PI;
    }
    Ok((p1 + p2, w, q1 + q2, delta * delta * (q2 - q1)))
}

/// `[(p₁, q₁), (p₂, q₂)]` with `q₁ ≤ q₂`.
pub(crate) fn chart_to_pair(z: f64, w: f64, eta: f64, zeta: f64) -> Result<[(f64, f64); 2]> {
    let half = 0.5 * w;
    let cos = half.cos();
    if w == PI || cos.abs() < 1e-300 {
        return Err(Error::SingularChart);
    }
    let delta = half.tan();
    let d = zeta / (delta * delta);
    let m = 0.5 * eta;
    Ok([
        (0.5 * (z - delta), m - 0.5 * d),
        (0.5 * (z + delta), m + 0.5 * d),
    ])
}

/// Derived quantities of a pair in the chart.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairGeom {
    pub z: f64,
    pub w: f64,
    pub zeta: f64,
    /// cot(w/2)
    pub c: f64,
    /// gap q₂ − q₁
    pub d: f64,
    /// midpoint η/2
    pub m: f64,
    pub cosh: f64,
    pub sinh: f64,
    /// sinh(d/2) / (d/2)
    pub shc: f64,
    /// (p₂ − p₁)·sinh(d/2), finite at w = π
    pub delta_sinh: f64,
}

impl PairGeom {
    pub fn new(z: f64, w: f64, eta: f64, zeta: f64) -> Self {
        let half = 0.5 * w;
        let c = half.cos() / half.sin();
        let d = zeta * c * c;
        let hd = 0.5 * d;
        let shc = if hd < 1e-4 {
            1.0 + hd * hd / 6.0 * (1.0 + hd * hd / 20.0)
        } else {
            hd.sinh() / hd
        };
        PairGeom {
            z,
            w,
            zeta,
            c,
            d,
            m: 0.5 * eta,
            cosh: hd.cosh(),
            sinh: hd.sinh(),
            shc,
            delta_sinh: 0.5 * zeta * c * shc,
        }
    }

    /// Field `(F, F')` of the pair at `x`, or `None` when `x` lies within the
    /// pair's window.
    #[inline]
    fn field_at(&self, x: f64) -> Option<(f64, f64)> {
        let y = (x - self.m).rem_euclid(1.0);
        let hd = 0.5 * self.d;
        if !(y > hd && y < 1.0 - hd) {
            return None;
        }
        let ch = chi_branch(y);
        let ct = chi_tilde_branch(y);
        Some((
            self.z * self.cosh * ch + self.delta_sinh * ct,
            -self.z * self.cosh * ct - self.delta_sinh * ch,
        ))
    }
}

/// `G(d) = (χ(0) − χ(d) + d χ'(d)) / d²` by its Taylor series, d ∈ [0, 1].
pub(crate) fn g_reduced(d: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    let mut pow = 1.0;
    for k in 0..30 {
        if k > 0 {
            fact *= k as f64;
            pow *= d;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let a = (1.0 + E * sign) / ((E - 1.0) * fact);
        sum += a * pow / (k as f64 + 2.0);
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    /// `[p, q]`
    Single,
    /// `[z, w, η, ζ]`
    Pair,
}

impl Kind {
    pub fn width(self) -> usize {
        match self {
            Kind::Single => 2,
            Kind::Pair => 4,
        }
    }
}

/// Layout of a mixed regular/chart phase vector.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct System {
    pub kinds: Vec<Kind>,
    pub offsets: Vec<usize>,
    pub dim: usize,
}

enum Elem {
    Single { p: f64, q: f64 },
    Pair(PairGeom),
}

impl System {
    pub fn new(kinds: Vec<Kind>) -> Self {
        let mut offsets = Vec::with_capacity(kinds.len());
        let mut dim = 0;
        for k in &kinds {
            offsets.push(dim);
            dim += k.width();
        }
        System { kinds, offsets, dim }
    }

    pub fn has_pairs(&self) -> bool {
        self.kinds.contains(&Kind::Pair)
    }

    fn elems(&self, y: &[f64]) -> Vec<Elem> {
        self.kinds
            .iter()
            .zip(&self.offsets)
            .map(|(k, &o)| match k {
                Kind::Single => Elem::Single { p: y[o], q: y[o + 1] },
                Kind::Pair => Elem::Pair(PairGeom::new(y[o], y[o + 1], y[o + 2], y[o + 3])),
            })
            .collect()
    }

    /// Field `(F, F')` at `x` of every element except `skip`.
    fn field(elems: &[Elem], skip: usize, x: f64) -> Result<(f64, f64)> {
        let mut f = 0.0;
        let mut fp = 0.0;
        for (k, e) in elems.iter().enumerate() {
            if k == skip {
                continue;
            }
            match e {
                Elem::Single { p, q } => {
                    let r = (x - q).rem_euclid(1.0);
                    if r == 0.0 || r >= 1.0 {
                        return Err(Error::CollisionRequired(skip.min(k), skip.max(k)));
                    }
                    f += p * chi_branch(r);
                    fp += p * chi_prime_branch(r);
                }
                Elem::Pair(g) => {
                    let (a, b) = g.field_at(x).ok_or_else(|| Error::UnsupportedInteraction {
                        time: f64::NAN,
                        detail: format!("element {skip} inside the window of pair {k}"),
                    })?;
                    f += a;
                    fp += b;
                }
            }
        }
        Ok((f, fp))
    }

    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let elems = self.elems(y);
        let c0 = chi_branch(0.0);
        for (k, e) in elems.iter().enumerate() {
            let o = self.offsets[k];
            match e {
                Elem::Single { p, q } => {
                    let (f, fp) = Self::field(&elems, k, *q)?;
                    dy[o] = -p * fp;
                    dy[o + 1] = p * c0 + f;
                }
                Elem::Pair(g) => {
                    if !(g.d < 1.0) {
                        return Err(Error::UnsupportedInteraction {
                            time: f64::NAN,
                            detail: format!("pair {k} gap {} exceeds the period", g.d),
                        });
                    }
                    let (a, fp) = Self::field(&elems, k, g.m)?;
                    let at = -fp;
                    let (z, zeta, c) = (g.z, g.zeta, g.c);
                    let half = 0.5 * g.w;
                    let (s2, c2) = (half.sin().powi(2), half.cos().powi(2));
                    let chd = chi_branch(g.d);
                    let cpd = chi_prime_branch(g.d);
                    dy[o] = z * g.cosh * at - g.delta_sinh * a;
                    dy[o + 1] = (s2 - z * z * c2) * cpd - 2.0 * z * g.sinh * a * c2
                        + g.cosh * at * g.w.sin();
                    dy[o + 2] = z * (c0 + chd) + 2.0 * g.cosh * a;
                    dy[o + 3] = zeta * zeta * c * g_reduced(g.d) - z * z * zeta * c * cpd
                        - 2.0 * z * g.sinh * a * zeta * c
                        + 2.0 * zeta * g.cosh * at
                        - zeta * g.shc * at;
                }
            }
        }
        Ok(())
    }

    /// Peakons in element order (pairs expand to left, right); positions are
    /// not reduced.
    pub fn peakons(&self, y: &[f64]) -> Result<PeakonState> {
        let mut p = Vec::new();
        let mut q = Vec::new();
        for (k, &o) in self.kinds.iter().zip(&self.offsets) {
            match k {
                Kind::Single => {
                    p.push(y[o]);
                    q.push(y[o + 1]);
                }
                Kind::Pair => {
                    for (pp, qq) in chart_to_pair(y[o], y[o + 1], y[o + 2], y[o + 3])? {
                        p.push(pp);
                        q.push(qq);
                    }
                }
            }
        }
        PeakonState::raw(p, q)
    }

    /// Occupied interval `[lo, hi]` of every element (unreduced).
    pub fn intervals(&self, y: &[f64]) -> Vec<(f64, f64)> {
        self.kinds
            .iter()
            .zip(&self.offsets)
            .map(|(k, &o)| match k {
                Kind::Single => (y[o + 1], y[o + 1]),
                Kind::Pair => {
                    let g = PairGeom::new(y[o], y[o + 1], y[o + 2], y[o + 3]);
                    (g.m - 0.5 * g.d, g.m + 0.5 * g.d)
                }
            })
            .collect()
    }
}
