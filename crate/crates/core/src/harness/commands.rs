//! `simulate`, `metric` and `approx` drivers.

use super::output::{ApproxRow, MetricRow, OutputRecord, SampleRow, Verdict};
use super::scenario::{ApproxSettings, Scenario, SeedSuite};
use crate::approx::{approx_error, datum, multipeakon_approx};
use crate::dynamics::{evolve, hamiltonian, Trajectory};
use crate::error::{Error, Result};
use crate::kernel::{energy, PeakonState};
use crate::metric::{
    lipschitz_constant, optimize_plan, plan_cdf_match, plan_characteristic, upper_bound_h1, MetricReport,
    OptimizeOptions, TransportPlan,
};

/// Largest `|X(t) − X(0)| / max(|X(0)|, 1)`.
fn relative_drift(values: impl Iterator<Item = f64>) -> f64 {
    let mut it = values;
    let Some(x0) = it.next() else { return 0.0 };
    let scale = x0.abs().max(1.0);
    it.fold(0.0, |m: f64, x| m.max((x - x0).abs() / scale))
}

/// Least-squares slope of `ln y` against `t`.
pub fn log_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let tm = t.iter().sum::<f64>() / n;
    let ym = ly.iter().sum::<f64>() / n;
    let num: f64 = t.iter().zip(&ly).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let den: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    num / den
}

pub fn sample_rows(traj: &Trajectory, times: &[f64]) -> Result<Vec<SampleRow>> {
    times
        .iter()
        .map(|&t| {
            let s = traj.state_at(t)?;
            Ok(SampleRow {
                t,
                regime: traj.regime_at(t)?.as_str().into(),
                energy: energy(&s),
                hamiltonian: hamiltonian(&s),
                momentum: s.momentum(),
                p: s.p,
                q: s.q,
            })
        })
        .collect()
}

pub fn cmd_simulate(sc: &Scenario) -> Result<OutputRecord> {
    let s0 = sc.initial_state()?;
    let traj = evolve(&s0, sc.t_final, &sc.solver)?;
    let mut rec = OutputRecord::new("simulate", Some(sc));
    rec.samples = sample_rows(&traj, &sc.times())?;
    rec.events = traj.events().to_vec();
    let tol = sc.drift_tol;
    rec.verdicts.push(Verdict::at_most(
        "energy-drift",
        "max_t |E(t) - E(0)| / max(E(0), 1) <= drift_tol",
        relative_drift(rec.samples.iter().map(|r| r.energy)),
        tol,
    ));
    rec.verdicts.push(Verdict::at_most(
        "hamiltonian-drift",
        "max_t |H(t) - H(0)| / max(H(0), 1) <= drift_tol",
        relative_drift(rec.samples.iter().map(|r| r.hamiltonian)),
        tol,
    ));
    rec.verdicts.push(Verdict::at_most(
        "momentum-drift",
        "max_t |P(t) - P(0)| / max(|P(0)|, 1) <= drift_tol",
        relative_drift(rec.samples.iter().map(|r| r.momentum)),
        tol,
    ));
    Ok(rec)
}

/// Seed plans for one sample time, with their names.
fn seeds_at(
    suite: SeedSuite,
    u: &PeakonState,
    v: &PeakonState,
    traj: Option<(&Trajectory, &Trajectory, &TransportPlan, f64)>,
    grid: usize,
) -> Result<Vec<(&'static str, TransportPlan)>> {
    let mut out = Vec::new();
    if suite.identity() {
        out.push(("identity", TransportPlan::identity()));
    }
    if suite.cdf() {
        out.push(("cdf", plan_cdf_match(u, v, grid)));
    }
    if suite.characteristic() {
        match traj {
            None => out.push(("characteristic", TransportPlan::identity().refined(grid))),
            Some((tu, tv, psi0, t)) => match plan_characteristic(tu, tv, psi0, t, grid) {
                Ok(p) => out.push(("characteristic", p)),
                Err(Error::EventInWindow { .. }) => {}
                Err(e) => return Err(e),
            },
        }
    }
    if out.is_empty() {
        out.push(("identity", TransportPlan::identity()));
    }
    Ok(out)
}

fn best_of(u: &PeakonState, v: &PeakonState, seeds: &[(&'static str, TransportPlan)], opts: &OptimizeOptions) -> Result<(MetricReport, &'static str)> {
    let plans: Vec<TransportPlan> = seeds.iter().map(|(_, p)| p.clone()).collect();
    let report = optimize_plan(u, v, &plans, opts)?;
    let name = seeds[report.seed].0;
    Ok((report, name))
}

fn metric_row(t: f64, u: &PeakonState, v: &PeakonState, report: &MetricReport, plan: &str) -> MetricRow {
    MetricRow {
        t,
        lower: report.lower,
        upper: report.upper,
        transport: report.breakdown.transport,
        excess: report.breakdown.excess,
        h1_bound: upper_bound_h1(u, v),
        plan: plan.into(),
    }
}

/// Default growth-rate ceiling: the Lipschitz bracket at the larger energy.
pub fn default_kappa(u: &PeakonState, v: &PeakonState) -> f64 {
    lipschitz_constant(energy(u).max(energy(v)))
}

pub fn cmd_metric(sc: &Scenario) -> Result<OutputRecord> {
    let (u0, v0) = (sc.initial_state()?, sc.partner_state()?);
    let tu = evolve(&u0, sc.t_final, &sc.solver)?;
    let tv = evolve(&v0, sc.t_final, &sc.solver)?;
    let ms = &sc.metric;
    let opts = ms.optimizer;
    let times = sc.times();

    let seeds0 = seeds_at(ms.seeds, &u0, &v0, None, ms.grid)?;
    let (r0, name0) = best_of(&u0, &v0, &seeds0, &opts)?;
    let psi0 = r0.best_plan.clone();
    let rest = opts.exec.map(&times[1..], |&t| -> Result<MetricRow> {
        let u = tu.state_at(t)?;
        let v = tv.state_at(t)?;
        let seeds = seeds_at(ms.seeds, &u, &v, Some((&tu, &tv, &psi0, t)), ms.grid)?;
        let (r, name) = best_of(&u, &v, &seeds, &opts)?;
        Ok(metric_row(t, &u, &v, &r, name))
    });
    let mut rec = OutputRecord::new("metric", Some(sc));
    rec.metric.push(metric_row(times[0], &u0, &v0, &r0, name0));
    for row in rest {
        rec.metric.push(row?);
    }
    rec.samples = sample_rows(&tu, &times)?;
    rec.events = tu.events().to_vec();

    let rows = &rec.metric;
    rec.verdicts.push(Verdict::at_most(
        "lower-le-upper",
        "max_t (lower_l1 - upper) <= quadrature tolerance",
        rows.iter().map(|r| r.lower - r.upper).fold(f64::NEG_INFINITY, f64::max),
        1e-9,
    ));
    rec.verdicts.push(Verdict::at_most(
        "upper-le-h1-bound",
        "max_t (upper - (8 pi + 3)(1 + |u| + |v|) |u - v|_H1) <= 0",
        rows.iter().map(|r| r.upper - r.h1_bound).fold(f64::NEG_INFINITY, f64::max),
        0.0,
    ));
    let kappa = ms.kappa_max.unwrap_or_else(|| default_kappa(&u0, &v0));
    let j0 = rows[0].upper;
    rec.verdicts.push(Verdict::at_most(
        "stability-envelope",
        "max_t upper(t) / (1.1 J0 exp(kappa_max |t|)) <= 1",
        rows.iter()
            .map(|r| {
                let env = 1.1 * j0 * (kappa * r.t.abs()).exp();
                if env > 0.0 {
                    r.upper / env
                } else if r.upper == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max),
        1.0,
    ));
    if rows.iter().all(|r| r.upper > 0.0) {
        let t: Vec<f64> = rows.iter().map(|r| r.t.abs()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.upper).collect();
        rec.verdicts.push(Verdict::at_most(
            "stability-rate",
            "fitted d ln(upper) / dt <= kappa_max",
            log_slope(&t, &y),
            kappa,
        ));
    }
    Ok(rec)
}

pub fn cmd_approx(a: &ApproxSettings, sc: Option<&Scenario>) -> Result<OutputRecord> {
    let d = datum(&a.datum)?;
    let mut rec = OutputRecord::new("approx", sc);
    for &n in &a.n_list {
        let s = multipeakon_approx(&d, n)?;
        rec.approx.push(ApproxRow {
            n,
            error: approx_error(&d, &s),
            mass: s.momentum(),
            exact_mass: d.total_mass(),
        });
    }
    let rows = &rec.approx;
    rec.verdicts.push(Verdict::at_most(
        "mass-identity",
        "max_N |sum p_i - integral (f - f'')/2| <= 1e-10",
        rows.iter().map(|r| (r.mass - r.exact_mass).abs()).fold(0.0, f64::max),
        1e-10,
    ));
    let mut by_n: Vec<&ApproxRow> = rows.iter().collect();
    by_n.sort_by_key(|r| r.n);
    rec.verdicts.push(Verdict::holds(
        "error-decreasing",
        "approx_error strictly decreasing in N",
        by_n.windows(2).filter(|w| w[0].n < w[1].n && !(w[1].error < w[0].error)).count(),
    ));
    let err_at = |n: usize| rows.iter().find(|r| r.n == n).map(|r| r.error);
    if a.datum == "sin" {
        if let (Some(e8), Some(e64)) = (err_at(8), err_at(64)) {
            rec.verdicts.push(Verdict::at_most("error-ratio", "error(64) / error(8) <= 1/4", e64 / e8, 0.25));
        }
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(text: &str) -> Scenario {
        Scenario::from_json(text).unwrap()
    }

    #[test]
    fn log_slope_of_an_exponential() {
        let t: Vec<f64> = (0..6).map(|k| k as f64 * 0.2).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (0.7 * t).exp()).collect();
        assert!((log_slope(&t, &y) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn single_peakon_has_flat_invariants() {
        let sc = scenario(r#"{"schema": 1, "initial": {"peakons": [[0.7, 0.2]]}, "samples": 5}"#);
        let rec = cmd_simulate(&sc).unwrap();
        assert!(rec.all_pass());
        let e0 = rec.samples[0].energy;
        assert!(rec.samples.iter().all(|r| (r.energy - e0).abs() < 1e-12));
        assert!(rec.events.is_empty());
    }

    #[test]
    fn empty_initial_data() {
        let sc = scenario(r#"{"schema": 1, "initial": {"peakons": []}, "samples": 3}"#);
        let rec = cmd_simulate(&sc).unwrap();
        assert!(rec.all_pass());
        assert!(rec.samples.iter().all(|r| r.p.is_empty() && r.energy == 0.0));
    }

    #[test]
    fn identical_pair_has_zero_upper() {
        let sc = scenario(
            r#"{"schema": 1, "initial": {"peakons": [[1.0, 0.3], [0.5, 0.7]]},
                "partner": {"peakons": [[1.0, 0.3], [0.5, 0.7]]}, "samples": 3, "t_final": 0.2}"#,
        );
        let rec = cmd_metric(&sc).unwrap();
        assert!(rec.metric.iter().all(|r| r.upper == 0.0), "{:?}", rec.metric);
        assert!(rec.all_pass());
    }

    #[test]
    fn approx_table_for_the_constant_datum() {
        let a = ApproxSettings { datum: "constant".into(), n_list: vec![1, 4, 16] };
        let rec = cmd_approx(&a, None).unwrap();
        assert_eq!(rec.approx.len(), 3);
        assert!(rec.all_pass(), "{:?}", rec.verdicts);
        // u_x is a zero-mean sawtooth with jump 1/N: error ≈ 1/(N √12)
        let oracle = 1.0 / (16.0 * 12f64.sqrt());
        assert!((rec.approx[2].error / oracle - 1.0).abs() < 1e-3, "{}", rec.approx[2].error);
    }
}
