//! Adaptive integration with chart switching and collision events.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::chart::{chart_to_pair, pair_to_chart, Kind, PairGeom, System};
use super::ode::{dp45_step, hermite, step_factor, Tolerance};
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::kernel::PeakonState;

/// A peakon–antipeakon interaction: time, location and concentrated energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub tau: f64,
    pub qbar: f64,
    pub atom: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Regular,
    Chart,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Regular => "regular",
            Regime::Chart => "chart",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpan {
    pub start: f64,
    pub end: f64,
    pub regime: Regime,
}

#[derive(Clone, Debug)]
struct Knot {
    t: f64,
    y: Vec<f64>,
    dy: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Segment {
    sys: System,
    knots: Vec<Knot>,
}

impl Segment {
    fn start(&self) -> f64 {
        self.knots[0].t
    }

    fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1].t
    }

    fn regime(&self) -> Regime {
        if self.sys.has_pairs() {
            Regime::Chart
        } else {
            Regime::Regular
        }
    }

    fn y_at(&self, t: f64) -> Vec<f64> {
        let k = &self.knots;
        if k.len() == 1 {
            return k[0].y.clone();
        }
        let i = k.partition_point(|kn| kn.t <= t).clamp(1, k.len() - 1);
        let (a, b) = (&k[i - 1], &k[i]);
        if t == a.t {
            return a.y.clone();
        }
        if t == b.t {
            return b.y.clone();
        }
        hermite(a.t, &a.y, &a.dy, b.t, &b.y, &b.dy, t)
    }
}

/// Piecewise solution: segments of fixed layout joined at chart switches.
#[derive(Clone, Debug)]
pub struct Trajectory {
    segments: Vec<Segment>,
    events: Vec<CollisionEvent>,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.segments[0].start()
    }

    pub fn t_end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn events(&self) -> &[CollisionEvent] {
        &self.events
    }

    /// First event with `a < τ < b`.
    pub fn event_between(&self, a: f64, b: f64) -> Option<&CollisionEvent> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.events.iter().find(|e| e.tau > lo && e.tau < hi)
    }

    fn segment(&self, t: f64) -> Result<&Segment> {
        let span = (self.t_end() - self.t_start()).abs().max(1.0);
        if !(t >= self.t_start() - 1e-12 * span && t <= self.t_end() + 1e-12 * span) {
            return Err(Error::OutOfRange(t));
        }
        let i = self.segments.partition_point(|s| s.end() < t);
        Ok(&self.segments[i.min(self.segments.len() - 1)])
    }

    /// Canonical state at time `t` (dense output). Fails with
    /// [`Error::SingularChart`] exactly at a collision.
    pub fn state_at(&self, t: f64) -> Result<PeakonState> {
        let seg = self.segment(t)?;
        let y = seg.y_at(t.clamp(seg.start(), seg.end()));
        Ok(seg.sys.peakons(&y)?.canonical())
    }

    /// The requested end time; equals `t_start()` for backward runs.
    pub fn t_final(&self) -> f64 {
        if self.t_start() < 0.0 {
            self.t_start()
        } else {
            self.t_end()
        }
    }

    /// State at `t = 0`.
    pub fn initial_state(&self) -> Result<PeakonState> {
        self.state_at(0.0)
    }

    /// State at `t_final()`.
    pub fn final_state(&self) -> Result<PeakonState> {
        self.state_at(self.t_final())
    }

    /// Accepted integration steps as `(t, state)`, times strictly increasing.
    pub fn samples(&self) -> Vec<(f64, PeakonState)> {
        let mut out: Vec<(f64, PeakonState)> = Vec::new();
        for seg in &self.segments {
            for k in &seg.knots {
                if out.last().is_some_and(|(t, _)| *t >= k.t) {
                    continue;
                }
                if let Ok(s) = seg.sys.peakons(&k.y) {
                    out.push((k.t, s.canonical()));
                }
            }
        }
        out
    }

    pub fn regime_log(&self) -> Vec<RegimeSpan> {
        let mut out: Vec<RegimeSpan> = Vec::new();
        for seg in &self.segments {
            let r = seg.regime();
            match out.last_mut() {
                Some(last) if last.regime == r => last.end = seg.end(),
                _ => out.push(RegimeSpan {
                    start: seg.start(),
                    end: seg.end(),
                    regime: r,
                }),
            }
        }
        out
    }

    pub fn regime_at(&self, t: f64) -> Result<Regime> {
        Ok(self.segment(t)?.regime())
    }
}

/// Element of the phase vector before layout.
#[derive(Clone, Copy, Debug)]
enum Item {
    Single(f64, f64),
    Pair([f64; 4]),
}

/// Adjacent pairs `(k, k+1 mod n)` heading into a collision in direction `dir`.
fn qualifying(p: &[f64], q: &[f64], cfg: &SolverConfig, dir: f64) -> Vec<(usize, usize)> {
    let n = p.len();
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in 0..n {
        let j = (k + 1) % n;
        let gap = if j == 0 { q[0] + 1.0 - q[n - 1] } else { q[j] - q[k] };
        if gap < cfg.gap_threshold
            && p[k] * p[j] < 0.0
            && dir * (p[k] - p[j]) > cfg.slope_threshold
        {
            out.push((k, j));
        }
    }
    out
}

/// Adjacent pairs of the canonical form of `s` that trigger the collision
/// chart in forward time. A qualifying pair has its positive member on the
/// left, so two qualifying pairs never share a peakon.
pub fn detect_collisions(s: &PeakonState, cfg: &SolverConfig) -> Vec<(usize, usize)> {
    let c = s.canonical();
    qualifying(&c.p, &c.q, cfg, 1.0)
}

/// First pair reported by [`detect_collisions`].
pub fn detect_collision(s: &PeakonState, cfg: &SolverConfig) -> Option<(usize, usize)> {
    detect_collisions(s, cfg).into_iter().next()
}

fn crossed(w: f64, dir: f64) -> bool {
    (w - PI) * dir < 0.0
}

/// Checks whether the layout must change after an accepted step and, if so,
/// returns the new element list.
fn transition(items: &[Item], cfg: &SolverConfig, dir: f64, t: f64) -> Result<Option<Vec<Item>>> {
    // flattened view: (p, q, owning item)
    let mut p = Vec::new();
    let mut q = Vec::new();
    let mut owner = Vec::new();
    for (i, it) in items.iter().enumerate() {
        match *it {
            Item::Single(pp, qq) => {
                p.push(pp);
                q.push(qq);
                owner.push(i);
            }
            Item::Pair([z, w, eta, zeta]) => {
                let Ok(members) = chart_to_pair(z, w, eta, zeta) else {
                    return Ok(None);
                };
                for (pp, qq) in members {
                    p.push(pp);
                    q.push(qq);
                    owner.push(i);
                }
            }
        }
    }
    let mut exit = vec![false; items.len()];
    for (i, it) in items.iter().enumerate() {
        if let Item::Pair([z, w, eta, zeta]) = *it {
            let g = PairGeom::new(z, w, eta, zeta);
            if (w - PI).abs() > cfg.chart_exit_margin || g.d > cfg.exit_gap() {
                exit[i] = true;
            }
        }
    }
    let cand = qualifying(&p, &q, cfg, dir);
    let mut fresh = Vec::new();
    for &(a, b) in &cand {
        let (ia, ib) = (owner[a], owner[b]);
        if ia == ib {
            continue;
        }
        for i in [ia, ib] {
            if let Item::Pair([_, w, ..]) = items[i] {
                if !crossed(w, dir) {
                    return Err(Error::UnsupportedInteraction {
                        time: t,
                        detail: "third peakon reaches a colliding pair".into(),
                    });
                }
                exit[i] = true;
            }
        }
        fresh.push((a, b));
    }
    if fresh.is_empty() && !exit.contains(&true) {
        return Ok(None);
    }
    // expand exiting pairs; view indices are preserved
    let mut flat: Vec<Item> = Vec::new();
    let mut item_of = vec![usize::MAX; p.len()];
    let mut k = 0;
    for (i, it) in items.iter().enumerate() {
        match it {
            Item::Pair(_) if exit[i] => {
                for _ in 0..2 {
                    item_of[k] = flat.len();
                    flat.push(Item::Single(p[k], q[k]));
                    k += 1;
                }
            }
            Item::Pair(_) => {
                item_of[k] = flat.len();
                item_of[k + 1] = flat.len();
                flat.push(*it);
                k += 2;
            }
            Item::Single(..) => {
                item_of[k] = flat.len();
                flat.push(*it);
                k += 1;
            }
        }
    }
    let mut starts: Vec<usize> = fresh.iter().map(|&(a, _)| item_of[a]).collect();
    let m = flat.len();
    if fresh.iter().any(|&(a, b)| b < a) {
        // pair straddles the wrap: move the last element to the front
        let last = flat.pop().unwrap();
        let Item::Single(pp, qq) = last else { unreachable!() };
        flat.insert(0, Item::Single(pp, qq - 1.0));
        starts = starts.iter().map(|&s| (s + 1) % m).collect();
    }
    starts.sort_unstable();
    let mut out = Vec::with_capacity(m);
    let mut i = 0;
    while i < flat.len() {
        if starts.binary_search(&i).is_ok() {
            let (Item::Single(p1, q1), Item::Single(p2, q2)) = (flat[i], flat[i + 1]) else {
                unreachable!()
            };
            let (z, w, eta, zeta) = pair_to_chart(p1, q1, p2, q2)?;
            out.push(Item::Pair([z, w, eta, zeta]));
            i += 2;
        } else {
            out.push(flat[i]);
            i += 1;
        }
    }
    Ok(Some(out))
}

fn layout(items: &[Item]) -> (System, Vec<f64>) {
    let first = match items.first() {
        Some(Item::Single(_, q)) => *q,
        Some(Item::Pair([_, _, eta, _])) => 0.5 * eta,
        None => 0.0,
    };
    let shift = first.floor();
    let mut kinds = Vec::new();
    let mut y = Vec::new();
    for it in items {
        match *it {
            Item::Single(p, q) => {
                kinds.push(Kind::Single);
                y.extend([p, q - shift]);
            }
            Item::Pair([z, w, eta, zeta]) => {
                kinds.push(Kind::Pair);
                y.extend([z, w, eta - 2.0 * shift, zeta]);
            }
        }
    }
    (System::new(kinds), y)
}

fn items_of(sys: &System, y: &[f64]) -> Vec<Item> {
    sys.kinds
        .iter()
        .zip(&sys.offsets)
        .map(|(k, &o)| match k {
            Kind::Single => Item::Single(y[o], y[o + 1]),
            Kind::Pair => Item::Pair([y[o], y[o + 1], y[o + 2], y[o + 3]]),
        })
        .collect()
}

/// Elements stay disjoint and in cyclic order.
fn ordered(sys: &System, y: &[f64]) -> bool {
    let iv = sys.intervals(y);
    let n = iv.len();
    if n == 0 {
        return true;
    }
    for (k, &(lo, hi)) in iv.iter().enumerate() {
        if !(hi >= lo && hi - lo < 1.0) {
            return false;
        }
        let next = if k + 1 < n { iv[k + 1].0 } else { iv[0].0 + 1.0 };
        if !(next > hi) {
            return false;
        }
    }
    true
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::UnsupportedInteraction { detail, .. } => Error::UnsupportedInteraction { time: t, detail },
        other => other,
    }
}

const MAX_STEPS: usize = 5_000_000;

/// Conservative evolution of `s0` over `[0, t_final]` (or `[t_final, 0]` for
/// negative `t_final`).
///
/// The regular Hamiltonian system is integrated until an adjacent
/// peakon–antipeakon pair closes within `gap_threshold` with a strength jump
/// above `slope_threshold`. That pair is then carried in the rescaled chart,
/// through `w = π`, and released when `|w − π|` exceeds the exit margin or
/// its gap exceeds `2·gap_threshold`.
pub fn evolve(s0: &PeakonState, t_final: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !t_final.is_finite() {
        return Err(Error::InvalidConfig(format!("t_final must be finite, got {t_final}")));
    }
    let s = PeakonState::new(s0.p.clone(), s0.q.clone())?;
    let dir = if t_final < 0.0 { -1.0 } else { 1.0 };
    let tol = Tolerance {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let mut items: Vec<Item> = s.p.iter().zip(&s.q).map(|(&p, &q)| Item::Single(p, q)).collect();
    if let Some(next) = transition(&items, cfg, dir, 0.0)? {
        items = next;
    }
    let mut t = 0.0;
    let mut h = cfg.max_step.min(1e-2 * t_final.abs().max(1e-2));
    let mut segments = Vec::new();
    let mut events = Vec::new();
    let mut steps = 0usize;
    loop {
        let (sys, y0) = layout(&items);
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| sys.rhs(y, dy);
        let mut dy0 = vec![0.0; sys.dim];
        f(t, &y0, &mut dy0).map_err(|e| with_time(e, t))?;
        let mut knots = vec![Knot { t, y: y0, dy: dy0 }];
        let mut next_items = None;
        while (t_final - t) * dir > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepUnderflow(t));
            }
            let remaining = (t_final - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            let cur = knots.last().unwrap();
            let res = dp45_step(&mut f, t, &cur.y, &cur.dy, dir * hs, tol);
            let accepted = match res {
                Ok(st) if st.err <= 1.0 && ordered(&sys, &st.y) => {
                    h = (hs * step_factor(st.err, true)).min(cfg.max_step);
                    Some(st)
                }
                Ok(st) if st.err <= 1.0 => {
                    h = 0.5 * hs;
                    None
                }
                Ok(st) => {
                    h = hs * step_factor(st.err, false);
                    None
                }
                Err(_) => {
                    h = 0.5 * hs;
                    None
                }
            };
            let Some(st) = accepted else {
                if h < 1e-14 * (1.0 + t.abs()) {
                    if sys.has_pairs() {
                        return Err(Error::UnsupportedInteraction {
                            time: t,
                            detail: "step size underflow while a pair is in the chart".into(),
                        });
                    }
                    return Err(Error::StepUnderflow(t));
                }
                continue;
            };
            let t_new = if last { t_final } else { t + dir * hs };
            let knot = Knot { t: t_new, y: st.y, dy: st.dy };
            for (k, &o) in sys.offsets.iter().enumerate() {
                if sys.kinds[k] != Kind::Pair {
                    continue;
                }
                let (w0, w1) = (cur.y[o + 1] - PI, knot.y[o + 1] - PI);
                if w0 != 0.0 && (w1 == 0.0 || (w0 > 0.0) != (w1 > 0.0)) {
                    events.push(locate_event(cur, &knot, o));
                }
            }
            t = t_new;
            knots.push(knot);
            let here = &knots[knots.len() - 1];
            if let Some(n) = transition(&items_of(&sys, &here.y), cfg, dir, t)? {
                next_items = Some(n);
                break;
            }
        }
        segments.push(Segment { sys: sys.clone(), knots });
        match next_items {
            Some(n) => items = n,
            None => break,
        }
    }
    if dir < 0.0 {
        segments.reverse();
        for seg in &mut segments {
            seg.knots.reverse();
        }
    }
    events.sort_by(|a: &CollisionEvent, b| a.tau.total_cmp(&b.tau));
    Ok(Trajectory { segments, events })
}

/// Bisection for `w = π` on the Hermite interpolant between two knots.
fn locate_event(a: &Knot, b: &Knot, o: usize) -> CollisionEvent {
    let at = |t: f64| hermite(a.t, &a.y[o..o + 4], &a.dy[o..o + 4], b.t, &b.y[o..o + 4], &b.dy[o..o + 4], t);
    let (mut lo, mut hi) = (a.t, b.t);
    let sign_lo = a.y[o + 1] > PI;
    while (hi - lo).abs() > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let v = at(mid)[1];
        if v == PI {
            lo = mid;
            hi = mid;
            break;
        }
        if (v > PI) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let v = at(tau);
    CollisionEvent {
        tau,
        qbar: (0.5 * v[2]).rem_euclid(1.0),
        atom: v[3],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian;
    use crate::kernel::{chi, energy};

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn single_peakon_travels() {
        let tr = evolve(&PeakonState::single(1.0, 0.0), 1.0, &cfg()).unwrap();
        let s = tr.final_state().unwrap();
        assert!((s.q[0] - (chi(0.0) - 2.0)).abs() < 1e-9);
        assert_eq!(s.p[0], 1.0);
        assert!(tr.events().is_empty());
    }

    #[test]
    fn empty_state() {
        let tr = evolve(&PeakonState::empty(), 1.0, &cfg()).unwrap();
        assert!(tr.final_state().unwrap().is_empty());
        assert_eq!(tr.regime_log().len(), 1);
    }

    #[test]
    fn detection() {
        let c = SolverConfig::default();
        let s = PeakonState::new(vec![30.0, -30.0], vec![0.496, 0.504]).unwrap();
        assert_eq!(detect_collision(&s, &c), Some((0, 1)));
        let s = PeakonState::new(vec![30.0, 30.0], vec![0.496, 0.504]).unwrap();
        assert_eq!(detect_collision(&s, &c), None);
        let s = PeakonState::new(vec![-30.0, 30.0], vec![0.496, 0.504]).unwrap();
        assert_eq!(detect_collision(&s, &c), None);
        let s = PeakonState::new(vec![-30.0, 30.0], vec![0.004, 0.996]).unwrap();
        assert_eq!(detect_collision(&s, &c), Some((1, 0)));
        let s = PeakonState::new(vec![30.0, -30.0, 30.0, -30.0], vec![0.2, 0.205, 0.6, 0.605]).unwrap();
        assert_eq!(detect_collisions(&s, &c), vec![(0, 1), (2, 3)]);
        let s = PeakonState::new(vec![30.0, -30.0, 30.0], vec![0.49, 0.495, 0.5]).unwrap();
        assert_eq!(detect_collisions(&s, &c), vec![(0, 1)]);
    }

    #[test]
    fn antisymmetric_collision() {
        let s = PeakonState::new(vec![1.0, -1.0], vec![0.4, 0.6]).unwrap();
        let tr = evolve(&s, 2.0, &cfg()).unwrap();
        assert_eq!(tr.events().len(), 1);
        let ev = tr.events()[0];
        assert!((ev.qbar - 0.5).abs() < 1e-9);
        let e0 = energy(&s);
        let e1 = energy(&tr.final_state().unwrap());
        assert!((e1 - e0).abs() < 1e-6 * e0, "{e0} {e1}");
        assert!((ev.atom - e0).abs() < 1e-6 * e0, "{} {e0}", ev.atom);
        let log = tr.regime_log();
        assert_eq!(log.len(), 3);
        assert_eq!(log[1].regime, Regime::Chart);
    }

    #[test]
    fn collision_across_the_wrap() {
        let s = PeakonState::new(vec![1.0, -1.0], vec![0.9, 0.1]).unwrap();
        let tr = evolve(&s, 2.0, &cfg()).unwrap();
        assert_eq!(tr.events().len(), 1);
        assert!(tr.events()[0].qbar.min(1.0 - tr.events()[0].qbar) < 1e-9);
    }

    #[test]
    fn backward_run_reverses_collision() {
        let s = PeakonState::new(vec![2.0, -2.0, 0.3], vec![0.35, 0.45, 0.8]).unwrap();
        let fw = evolve(&s, 0.8, &cfg()).unwrap();
        assert_eq!(fw.events().len(), 1);
        let end = fw.final_state().unwrap();
        let bw = evolve(&end, -0.8, &cfg()).unwrap();
        assert_eq!(bw.events().len(), 1);
        assert!((bw.t_start() + 0.8).abs() < 1e-15 && bw.t_end() == 0.0);
        let back = bw.final_state().unwrap();
        for (a, b) in back.p.iter().zip(&s.p).chain(back.q.iter().zip(&s.q)) {
            assert!((a - b).abs() < 1e-5, "{a} {b}");
        }
        let h0 = hamiltonian(&s);
        assert!((hamiltonian(&end) - h0).abs() < 1e-6);
    }
}
