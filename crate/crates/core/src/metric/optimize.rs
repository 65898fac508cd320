//! Coordinate descent over plan breakpoints.

use serde::{Deserialize, Serialize};

use super::bounds::lower_bound_l1;
use super::cost::{piece_cost, CostBreakdown};
use super::plan::TransportPlan;
use super::seeds::golden;
use super::MetricReport;
use crate::error::{Error, Result};
use crate::kernel::PeakonState;
use crate::par::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeOptions {
    /// Full passes over the breakpoints.
    pub sweeps: usize,
    /// Golden-section iterations per coordinate.
    pub golden_iters: usize,
    /// Seeds are refined to at least this many breakpoints.
    pub breakpoints: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            sweeps: 3,
            golden_iters: 20,
            breakpoints: 16,
            exec: Exec::default(),
        }
    }
}

fn piece(u: &PeakonState, v: &PeakonState, plan: &TransportPlan, k: usize) -> CostBreakdown {
    let (xa, ya) = plan.knot(k);
    let (xb, yb) = plan.knot(k + 1);
    piece_cost(u, v, xa, xb, ya, yb)
}

fn total(pieces: &[CostBreakdown]) -> CostBreakdown {
    pieces.iter().fold(CostBreakdown::default(), |a, &b| a + b)
}

/// Descends from one seed; returns the plan, its cost and the cost after
/// every sweep.
fn descend(u: &PeakonState, v: &PeakonState, seed: &TransportPlan, opts: &OptimizeOptions) -> (TransportPlan, CostBreakdown, Vec<f64>) {
    let mut plan = seed.refined(opts.breakpoints.max(2));
    let n = plan.len();
    let mut pieces: Vec<CostBreakdown> = (0..n).map(|k| piece(u, v, &plan, k)).collect();
    let mut best = total(&pieces);
    let mut history = vec![best.total()];
    for _ in 0..opts.sweeps {
        let before = plan.clone();
        for j in 0..n {
            let prev = (j + n - 1) % n;
            let lo = if j == 0 { plan.ys()[n - 1] - 1.0 } else { plan.ys()[j - 1] };
            let hi = if j + 1 == n { plan.ys()[0] + 1.0 } else { plan.ys()[j + 1] };
            let margin = 1e-3 * (hi - lo);
            let current = pieces[prev].total() + pieces[j].total();
            let y0 = plan.ys()[j];
            let mut trial = plan.clone();
            let (y, val) = golden(lo + margin, hi - margin, opts.golden_iters, |y| {
                trial.set_y(j, y);
                piece(u, v, &trial, prev).total() + piece(u, v, &trial, j).total()
            });
            if val < current {
                plan.set_y(j, y);
                pieces[prev] = piece(u, v, &plan, prev);
                pieces[j] = piece(u, v, &plan, j);
            } else {
                plan.set_y(j, y0);
            }
        }
        let now = total(&pieces);
        if now.total() > best.total() {
            plan = before;
            break;
        }
        let gain = best.total() - now.total();
        best = now;
        history.push(best.total());
        if gain <= 1e-12 * (1.0 + best.total()) {
            break;
        }
    }
    (plan, best, history)
}

/// Best plan found by deterministic coordinate descent from every seed.
///
/// Each seed is refined to `opts.breakpoints` breakpoints; every sweep
/// minimises the cost over one `y_k` at a time by golden section strictly
/// between its neighbours, so monotonicity is preserved. Only the two
/// pieces adjacent to `y_k` are re-evaluated. Seeds run under `opts.exec`;
/// ties are broken by seed order.
pub fn optimize_plan(u: &PeakonState, v: &PeakonState, seeds: &[TransportPlan], opts: &OptimizeOptions) -> Result<MetricReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidPlan("optimize_plan needs at least one seed".into()));
    }
    let runs = opts.exec.map(seeds, |s| descend(u, v, s, opts));
    let seed_costs: Vec<f64> = runs.iter().map(|r| r.1.total()).collect();
    let best = (0..runs.len())
        .min_by(|&a, &b| seed_costs[a].total_cmp(&seed_costs[b]).then(a.cmp(&b)))
        .unwrap();
    let (plan, breakdown, _) = runs.into_iter().nth(best).unwrap();
    Ok(MetricReport {
        upper: breakdown.total(),
        lower: lower_bound_l1(u, v),
        best_plan: plan,
        breakdown,
        seed: best,
        seed_costs,
    })
}

/// Cost after each sweep of the descent from `seed`; non-increasing.
pub fn descent_history(u: &PeakonState, v: &PeakonState, seed: &TransportPlan, opts: &OptimizeOptions) -> Vec<f64> {
    descend(u, v, seed, opts).2
}
