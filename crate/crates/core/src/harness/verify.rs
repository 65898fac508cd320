//! Named verification suites. Each returns verdict rows; `all` runs them in
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::commands::{cmd_approx, cmd_metric};
use super::output::{OutputRecord, Verdict};
use super::scenario::{ApproxSettings, Scenario};
use crate::dynamics::{characteristic_flow_many, evolve, hamiltonian, residual_check, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::kernel::{chi, chi_prime, chi_prime_branch, chi_tilde, energy, h1_distance, PeakonState};
use crate::metric::{
    lipschitz_constant, lower_bound_l1, optimize_plan, plan_cdf_match, transport_cost, upper_bound_h1,
    OptimizeOptions, TransportPlan,
};
use crate::par::Exec;
use crate::quadrature::Rule;

pub const SUITES: [&str; 10] = [
    "kernel",
    "conservation",
    "collision",
    "metric-axioms",
    "lemma3",
    "lemma5",
    "lemma7",
    "lemma1",
    "residual",
    "reversibility",
];

const SEED: u64 = 0x5eed_2024;
const RANDOM_PAIRS: usize = 200;

/// Runs `name` (one of [`SUITES`] or `all`).
pub fn cmd_verify(name: &str, exec: Exec) -> Result<OutputRecord> {
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return Err(Error::UnknownSuite(name.into()));
    };
    let mut rec = OutputRecord::new(&format!("verify {name}"), None);
    for n in names {
        rec.verdicts.extend(run_suite(n, exec)?);
    }
    Ok(rec)
}

pub fn run_suite(name: &str, exec: Exec) -> Result<Vec<Verdict>> {
    let mut out = match name {
        "kernel" => kernel(),
        "conservation" => conservation(exec)?,
        "collision" => collision()?,
        "metric-axioms" => metric_axioms(exec),
        "lemma3" => sandwich(exec)?,
        "lemma5" => time_lipschitz()?,
        "lemma7" => stability()?,
        "lemma1" => convergence()?,
        "residual" => residual()?,
        "reversibility" => reversibility()?,
        other => return Err(Error::UnknownSuite(other.into())),
    };
    for v in &mut out {
        v.id = format!("{name}/{}", v.id);
    }
    Ok(out)
}

/// `N ∈ [1, n_max]` peakons, strengths in `[-p_max, p_max]` (all of one
/// sign when `same_sign`), positions at least `1e-2` apart.
pub fn random_state(rng: &mut ChaCha8Rng, n_max: usize, p_max: f64, same_sign: bool) -> PeakonState {
    loop {
        let n = rng.gen_range(1..=n_max);
        let mut q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        q.sort_by(f64::total_cmp);
        let gaps = (0..n).map(|i| if i + 1 < n { q[i + 1] - q[i] } else { q[0] + 1.0 - q[i] });
        if n > 1 && gaps.fold(f64::INFINITY, f64::min) < 1e-2 {
            continue;
        }
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let p = (0..n)
            .map(|_| {
                if same_sign {
                    sign * rng.gen_range(0.05..=p_max)
                } else {
                    rng.gen_range(-p_max..=p_max)
                }
            })
            .collect();
        return PeakonState::new(p, q).expect("sorted distinct positions");
    }
}

fn random_pairs(n: usize) -> Vec<(PeakonState, PeakonState, PeakonState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..n)
        .map(|_| {
            let u = random_state(&mut rng, 5, 2.0, false);
            let v = random_state(&mut rng, 5, 2.0, false);
            let w = random_state(&mut rng, 5, 2.0, false);
            (u, v, w)
        })
        .collect()
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn kernel() -> Vec<Verdict> {
    let xs: Vec<f64> = (0..100).map(|k| (k as f64 + 0.5) / 100.0).collect();
    // Richardson-extrapolated central difference of χ'
    let second = |x: f64| {
        let d = |h: f64| (chi_prime(x + h) - chi_prime(x - h)) / (2.0 * h);
        (4.0 * d(5e-4) - d(1e-3)) / 3.0
    };
    let ode = max_of(xs.iter().map(|&x| (second(x) - chi(x)).abs()));
    let jump = chi_prime_branch(0.0) - chi_prime_branch(1.0);
    let e = std::f64::consts::E;
    let tilde = max_of(xs.iter().map(|&x| {
        let closed = (-x.exp() + (1.0 - x).exp()) / (e - 1.0);
        (chi_tilde(x) - closed).abs().max((chi_tilde(x) + chi_prime(x)).abs())
    }));
    vec![
        Verdict::at_most("chi-ode", "max |chi'' - chi| on 100 interior points <= 1e-10", ode, 1e-10),
        Verdict::at_most("chi-jump", "|[chi'](0) + 2| <= 1e-15", (jump + 2.0).abs(), 1e-15),
        Verdict::at_most("chi-tilde", "max |chi_tilde + chi'| <= 1e-14", tilde, 1e-14),
    ]
}

fn conservation(exec: Exec) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let states: Vec<PeakonState> = (0..50).map(|_| random_state(&mut rng, 5, 2.0, true)).collect();
    let cfg = SolverConfig { rel_tol: 1e-10, ..SolverConfig::default() };
    let runs = exec.map(&states, |s| -> Result<(f64, f64, usize)> {
        let traj = evolve(s, 1.0, &cfg)?;
        let (h0, m0) = (hamiltonian(s), s.momentum());
        let mut dh: f64 = 0.0;
        let mut dm: f64 = 0.0;
        for (_, st) in traj.samples() {
            dh = dh.max((hamiltonian(&st) - h0).abs());
            dm = dm.max((st.momentum() - m0).abs());
        }
        Ok((dh, dm, traj.events().len()))
    });
    let runs: Vec<(f64, f64, usize)> = runs.into_iter().collect::<Result<_>>()?;
    Ok(vec![
        Verdict::at_most("hamiltonian", "max |H(t) - H(0)| over 50 states, t in [0, 1] <= 1e-8", max_of(runs.iter().map(|r| r.0)), 1e-8),
        Verdict::at_most("momentum", "max |P(t) - P(0)| over 50 states, t in [0, 1] <= 1e-8", max_of(runs.iter().map(|r| r.1)), 1e-8),
        Verdict::holds("regular", "no collision events for same-sign data", runs.iter().map(|r| r.2).sum()),
    ])
}

fn pair_collision() -> PeakonState {
    PeakonState::new(vec![1.0, -1.0], vec![0.4, 0.6]).unwrap()
}

/// `∫ u_x²` over the gap between the two peakons of `s`.
fn gap_energy(s: &PeakonState) -> f64 {
    let (a, b) = (s.q[0], s.q[1]);
    let breaks: Vec<f64> = (0..=16).map(|k| a + (b - a) * k as f64 / 16.0).collect();
    Rule::standard().integrate_panels(&breaks, |x| s.value(x).1.powi(2))
}

fn collision() -> Result<Vec<Verdict>> {
    let s0 = pair_collision();
    let traj = evolve(&s0, 2.0, &SolverConfig::default())?;
    let mut out = vec![Verdict::at_most(
        "event-count",
        "|#events - 1| <= 0",
        (traj.events().len() as f64 - 1.0).abs(),
        0.0,
    )];
    let Some(ev) = traj.events().first().copied() else {
        return Ok(out);
    };
    let e0 = energy(&s0);
    let rel = |s: &PeakonState| (energy(s) - e0).abs() / e0;
    let across = [ev.tau - 1e-2, ev.tau + 1e-2, 2.0]
        .iter()
        .map(|&t| traj.state_at(t).map(|s| rel(&s)))
        .collect::<Result<Vec<_>>>()?;
    out.push(Verdict::at_most("energy", "relative energy change across the collision <= 1e-4", max_of(across), 1e-4));

    let mut odd: f64 = 0.0;
    for k in 0..=200 {
        let s = traj.state_at(2.0 * k as f64 / 200.0)?;
        for j in 0..=64 {
            let x = 0.5 * j as f64 / 64.0;
            odd = odd.max((s.value(ev.qbar + x).0 + s.value(ev.qbar - x).0).abs());
        }
    }
    out.push(Verdict::at_most("odd-symmetry", "max |u(qbar + x) + u(qbar - x)| <= 1e-6", odd, 1e-6));

    // quadratic extrapolation of the gap energy to the collision time
    let hs = [4e-3, 2e-3, 1e-3];
    let g = hs
        .iter()
        .map(|&h| traj.state_at(ev.tau - h).map(|s| gap_energy(&s)))
        .collect::<Result<Vec<_>>>()?;
    let limit = richardson3(&hs, &g);
    out.push(Verdict::at_most(
        "atom",
        "|atom - lim integral_gap u_x^2| / atom <= 0.05",
        (ev.atom - limit).abs() / ev.atom,
        0.05,
    ));
    Ok(out)
}

/// Value at 0 of the parabola through three points.
fn richardson3(h: &[f64; 3], g: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= (0.0 - h[j]) / (h[i] - h[j]);
            }
        }
        acc += w * g[i];
    }
    acc
}

fn metric_axioms(exec: Exec) -> Vec<Verdict> {
    let triples = random_pairs(RANDOM_PAIRS);
    let rows = exec.map(&triples, |(u, v, w)| {
        let id = transport_cost(u, u, &TransportPlan::identity()).total().abs();
        let a = plan_cdf_match(u, v, 32);
        let b = plan_cdf_match(v, w, 32);
        let sym = (transport_cost(u, v, &a).total() - transport_cost(v, u, &a.inverse()).total()).abs();
        let tri = transport_cost(u, w, &b.compose(&a)).total() - transport_cost(u, v, &a).total() - transport_cost(v, w, &b).total();
        (id, sym, tri)
    });
    vec![
        Verdict::at_most("identity", "max J^id(u, u) <= 0 on 200 states", max_of(rows.iter().map(|r| r.0)), 0.0),
        Verdict::at_most("symmetry", "max |J^psi(u, v) - J^{psi^-1}(v, u)| <= 1e-10 on 200 pairs", max_of(rows.iter().map(|r| r.1)), 1e-10),
        Verdict::at_most(
            "triangle",
            "max J^{b o a}(u, w) - J^a(u, v) - J^b(v, w) <= 1e-8 on 200 triples",
            max_of(rows.iter().map(|r| r.2)),
            1e-8,
        ),
    ]
}

fn sandwich(exec: Exec) -> Result<Vec<Verdict>> {
    let triples = random_pairs(RANDOM_PAIRS);
    let opts = OptimizeOptions { exec: Exec::Sequential, ..OptimizeOptions::default() };
    let rows = exec.map(&triples, |(u, v, _)| -> Result<(f64, f64, f64)> {
        let seeds = [TransportPlan::identity(), plan_cdf_match(u, v, 32)];
        let r = optimize_plan(u, v, &seeds, &opts)?;
        Ok((lower_bound_l1(u, v), r.upper, upper_bound_h1(u, v)))
    });
    let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
    Ok(vec![
        Verdict::holds("lower", "lower_l1 <= upper on 200 pairs (violations)", rows.iter().filter(|r| r.0 > r.1).count()),
        Verdict::holds(
            "upper",
            "upper <= (8 pi + 3)(1 + |u| + |v|) |u - v|_H1 on 200 pairs (violations)",
            rows.iter().filter(|r| r.1 > r.2).count(),
        ),
    ])
}

fn three_peakons() -> PeakonState {
    PeakonState::new(vec![1.0, 0.6, 0.3], vec![0.15, 0.45, 0.75]).unwrap()
}

/// Plan carrying `u(s)` to `u(s + h)` along the characteristics.
fn flow_plan(traj: &Trajectory, s: f64, h: f64, grid: usize) -> Result<TransportPlan> {
    let xs: Vec<f64> = (0..grid).map(|k| k as f64 / grid as f64).collect();
    let ys = characteristic_flow_many(traj, s, s + h, &xs)?;
    TransportPlan::new(xs.into_iter().zip(ys).collect())
}

fn time_lipschitz() -> Result<Vec<Verdict>> {
    let s0 = three_peakons();
    let traj = evolve(&s0, 0.5, &SolverConfig::default())?;
    let c = lipschitz_constant(energy(&s0));
    let s = 0.3;
    let u = traj.state_at(s)?;
    let opts = OptimizeOptions::default();
    let mut ratio: f64 = 0.0;
    for h in [1e-3, 1e-2, 1e-1] {
        let v = traj.state_at(s + h)?;
        let seeds = [TransportPlan::identity(), plan_cdf_match(&u, &v, 64), flow_plan(&traj, s, h, 64)?];
        let r = optimize_plan(&u, &v, &seeds, &opts)?;
        ratio = ratio.max(r.upper / (c * h));
    }
    Ok(vec![Verdict::at_most(
        "lipschitz",
        "max_h upper(u(s), u(s + h)) / (C(E) h) <= 1, C(E) = 3 + 23E + 10E^2",
        ratio,
        1.0,
    )])
}

fn stability() -> Result<Vec<Verdict>> {
    let sc = Scenario::from_json(
        r#"{"schema": 1, "name": "stability",
            "initial": {"peakons": [[1.0, 0.4], [-1.0, 0.6]]},
            "partner": {"peakons": [[1.0001, 0.4001], [-0.9999, 0.6001]]},
            "t_final": 1.0, "samples": 11}"#,
    )?;
    let rec = cmd_metric(&sc)?;
    Ok(rec.verdicts.into_iter().filter(|v| v.id.starts_with("stability")).collect())
}

fn convergence() -> Result<Vec<Verdict>> {
    let a = ApproxSettings { datum: "sin".into(), n_list: vec![8, 16, 32, 64] };
    Ok(cmd_approx(&a, None)?.verdicts)
}

fn residual() -> Result<Vec<Verdict>> {
    let single = PeakonState::single(0.8, 0.3);
    let t1 = evolve(&single, 1.0, &SolverConfig::default())?;
    let t3 = evolve(&three_peakons(), 1.0, &SolverConfig::default())?;
    Ok(vec![
        Verdict::at_most("single", "L2 residual of a travelling peakon, dt = 1e-4 <= 1e-4", residual_check(&t1, 0.5, 1e-4)?, 1e-4),
        Verdict::at_most("three", "L2 residual of a 3-peakon solution, dt = 1e-4 <= 1e-3", residual_check(&t3, 0.5, 1e-4)?, 1e-3),
    ])
}

fn reversibility() -> Result<Vec<Verdict>> {
    let s0 = pair_collision();
    let cfg = SolverConfig::default();
    let fw = evolve(&s0, 2.0, &cfg)?;
    let bw = evolve(&fw.final_state()?, -2.0, &cfg)?;
    let back = bw.final_state()?;
    Ok(vec![
        Verdict::holds("one-collision", "forward and backward runs each cross one collision", (fw.events().len() != 1) as usize + (bw.events().len() != 1) as usize),
        Verdict::at_most("h1", "|u(0) - back(forward(u(0)))|_H1 <= 1e-4", h1_distance(&back, &s0), 1e-4),
    ])
}
