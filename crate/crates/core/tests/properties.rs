use std::f64::consts::TAU;

use proptest::prelude::*;

use peakon_core::dynamics::{from_rescaled, hamiltonian, rhs_regular, to_rescaled};
use peakon_core::kernel::{chi, chi_prime, energy, h1_distance, l1_distance};
use peakon_core::metric::{
    d_diamond, lower_bound_l1, phi_pair, transport_cost, upper_bound_h1, LiftedPoint, TransportPlan,
};
use peakon_core::PeakonState;

/// Sorted positions at least `1e-2` apart on the circle.
fn positions(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, n)
        .prop_map(|mut q| {
            q.sort_by(f64::total_cmp);
            q
        })
        .prop_filter("separated", |q| {
            let n = q.len();
            n < 2 || (0..n).all(|i| {
                let next = if i + 1 < n { q[i + 1] } else { q[0] + 1.0 };
                next - q[i] >= 1e-2
            })
        })
}

fn state(max_n: usize) -> impl Strategy<Value = PeakonState> {
    (1..=max_n)
        .prop_flat_map(|n| (prop::collection::vec(-2.0..2.0f64, n), positions(n)))
        .prop_map(|(p, q)| PeakonState::new(p, q).unwrap())
}

/// Plans built from positive increments in both coordinates.
fn plan() -> impl Strategy<Value = TransportPlan> {
    (1..8usize)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0.2..1.0f64, k),
                prop::collection::vec(0.2..1.0f64, k),
                -0.5..0.5f64,
                -0.5..0.5f64,
            )
        })
        .prop_map(|(dx, dy, x0, y0)| {
            let (sx, sy): (f64, f64) = (dx.iter().sum(), dy.iter().sum());
            let mut pts = Vec::new();
            let (mut x, mut y) = (x0, y0);
            for (a, b) in dx.iter().zip(&dy) {
                pts.push((x, y));
                x += a / sx;
                y += b / sy;
            }
            TransportPlan::new(pts).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_is_even_and_periodic(x in -3.0..3.0f64) {
        prop_assert!((chi(x) - chi(-x)).abs() < 1e-13);
        prop_assert!((chi(x + 1.0) - chi(x)).abs() < 1e-13);
        let r = x.rem_euclid(1.0);
        if r > 1e-9 && r < 1.0 - 1e-9 {
            prop_assert!((chi_prime(x) + chi_prime(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_is_four_times_hamiltonian(s in state(5)) {
        let e = energy(&s);
        prop_assert!((e - 4.0 * hamiltonian(&s)).abs() <= 1e-10 * (1.0 + e));
    }

    #[test]
    fn energy_and_distances_are_translation_invariant(s in state(4), t in state(4), d in -1.0..1.0f64) {
        let (sd, td) = (s.translated(d), t.translated(d));
        prop_assert!((energy(&sd) - energy(&s)).abs() < 1e-10 * (1.0 + energy(&s)));
        prop_assert!((h1_distance(&sd, &td) - h1_distance(&s, &t)).abs() < 1e-8);
        prop_assert!((l1_distance(&sd, &td) - l1_distance(&s, &t)).abs() < 1e-8);
    }

    #[test]
    fn momentum_is_a_constant_of_motion(s in state(5)) {
        let (dp, _) = rhs_regular(&s).unwrap();
        let total: f64 = dp.iter().sum();
        let scale: f64 = dp.iter().map(|x| x.abs()).sum();
        prop_assert!(total.abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn chart_round_trip(
        a in 0.1..3.0f64,
        b in 0.1..3.0f64,
        gap in 1e-4..0.05f64,
        at in 0.0..0.4f64,
        extra in prop::option::of(-2.0..2.0f64),
    ) {
        let mut p = vec![a, -b];
        let mut q = vec![at, at + gap];
        if let Some(e) = extra {
            p.push(e);
            q.push(at + 0.5);
        }
        let s = PeakonState::new(p, q).unwrap();
        let c = to_rescaled(&s, 0, 1).unwrap();
        let back = from_rescaled(&c).unwrap();
        let s = s.canonical();
        prop_assert_eq!(back.len(), s.len());
        for i in 0..s.len() {
            prop_assert!((back.p[i] - s.p[i]).abs() < 1e-9 * (1.0 + s.p[i].abs()), "{:?} {:?}", back, s);
            prop_assert!((back.q[i] - s.q[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn plan_group_identities(psi in plan(), x in -2.0..2.0f64) {
        let id = TransportPlan::identity();
        prop_assert!((psi.inverse().inverse().eval(x) - psi.eval(x)).abs() < 1e-12);
        prop_assert!((id.compose(&psi).eval(x) - psi.eval(x)).abs() < 1e-12);
        prop_assert!((psi.compose(&id).eval(x) - psi.eval(x)).abs() < 1e-12);
        prop_assert!((psi.compose(&psi.inverse()).eval(x) - x).abs() < 1e-12);
        prop_assert!((psi.eval(x + 1.0) - psi.eval(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_distance_is_a_capped_metric(
        a in (-1.0..1.0f64, -2.0..2.0f64, 0.0..TAU),
        b in (-1.0..1.0f64, -2.0..2.0f64, 0.0..TAU),
        c in (-1.0..1.0f64, -2.0..2.0f64, 0.0..TAU),
    ) {
        let [a, b, c] = [a, b, c].map(|(x, u, t)| LiftedPoint::new(x, u, t));
        let (ab, bc, ac) = (d_diamond(&a, &b), d_diamond(&b, &c), d_diamond(&a, &c));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - d_diamond(&b, &a)).abs() < 1e-15);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert_eq!(d_diamond(&a, &a), 0.0);
    }

    #[test]
    fn mass_split_saturates(u in state(3), v in state(3), psi in plan(), x in 0.0..1.0f64) {
        let (phi1, phi2) = phi_pair(&u, &v, &psi, x);
        prop_assert!((phi1.max(phi2) - 1.0).abs() < 1e-15);
        prop_assert!(phi1 > 0.0 && phi2 > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cost_is_symmetric_under_inversion(u in state(3), v in state(3), psi in plan()) {
        let a = transport_cost(&u, &v, &psi).total();
        let b = transport_cost(&v, &u, &psi.inverse()).total();
        prop_assert!((a - b).abs() < 1e-10, "{} {}", a, b);
    }

    #[test]
    fn every_plan_cost_sits_above_the_lower_bound(u in state(3), v in state(3), psi in plan()) {
        let cost = transport_cost(&u, &v, &psi).total();
        prop_assert!(lower_bound_l1(&u, &v) <= cost + 1e-12);
    }

    #[test]
    fn identity_cost_is_below_the_h1_bound(u in state(3), v in state(3)) {
        let cost = transport_cost(&u, &v, &TransportPlan::identity()).total();
        prop_assert!(cost <= upper_bound_h1(&u, &v) + 1e-12);
    }
}
