//! Panel Gauss–Legendre quadrature.
//!
//! Every integrand in this crate is a smooth combination of exponentials
//! between kinks whose locations are either known in advance (peakon
//! positions, plan breakpoints) or are sign changes of continuous "switch"
//! functions (`min`, `|·|`, caps). Panels are split at all of them so that a
//! fixed-order rule is accurate to rounding on every sub-panel.

use std::sync::OnceLock;

/// Default per-panel order.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Clone, Debug)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule with `n` nodes on `[-1, 1]`, by Newton iteration on
    /// the three-term recurrence.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Shared order-16 rule.
    pub fn standard() -> &'static Rule {
        static RULE: OnceLock<Rule> = OnceLock::new();
        RULE.get_or_init(|| Rule::gauss_legendre(DEFAULT_ORDER))
    }

    /// Maps the nodes onto `[a, b]`, yielding `(x, weight)`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        if b == a {
            return 0.0;
        }
        self.points(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Integrates over consecutive panels `[breaks[k], breaks[k+1]]`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sorted breakpoints covering `[a, b]`: the endpoints plus every periodic
/// image `c + n` (period 1) of the given points that falls strictly inside.
pub fn periodic_breaks<I: IntoIterator<Item = f64>>(a: f64, b: f64, points: I) -> Vec<f64> {
    let mut out = vec![a, b];
    for c in points {
        let mut x = c + (a - c).ceil();
        while x < b {
            if x > a {
                out.push(x);
            }
            x += 1.0;
        }
    }
    sort_dedup(&mut out, 1e-13);
    out
}

pub fn sort_dedup(xs: &mut Vec<f64>, tol: f64) {
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup_by(|b, a| (*b - *a).abs() <= tol * (1.0 + a.abs()));
}

/// Minimum number of equally spaced probes per panel used to detect sign
/// changes of switch functions.
pub const SWITCH_PROBES: usize = 12;

/// Probes per unit length on long panels.
pub const PROBE_DENSITY: f64 = 1024.0;

/// Probe count for a panel of the given length.
pub fn probes_for(length: f64) -> usize {
    SWITCH_PROBES.max((length * PROBE_DENSITY).ceil() as usize)
}

/// Locates sign changes on `[a, b]` of `m` continuous switch functions.
///
/// `switches(x, out)` writes the `m` switch values at `x`. Each function is
/// probed at `probes` + 1 equally spaced points; every bracketed
/// sign change is refined by the Illinois variant of regula falsi. The
/// refinement is affine-invariant, so a linearly reparametrised panel yields
/// the mapped roots.
pub fn switch_roots<S>(a: f64, b: f64, probes: usize, m: usize, mut switches: S) -> Vec<f64>
where
    S: FnMut(f64, &mut [f64]),
{
    if m == 0 || b <= a {
        return Vec::new();
    }
    let n = probes.max(1);
    let xs: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let mut vals = vec![0.0; (n + 1) * m];
    for (k, &x) in xs.iter().enumerate() {
        switches(x, &mut vals[k * m..(k + 1) * m]);
    }
    let mut roots = Vec::new();
    let mut buf = vec![0.0; m];
    for j in 0..m {
        for k in 0..n {
            let fa = vals[k * m + j];
            let fb = vals[(k + 1) * m + j];
            if fa == 0.0 || fb == 0.0 || (fa > 0.0) == (fb > 0.0) {
                continue;
            }
            let r = illinois(xs[k], xs[k + 1], fa, fb, |x| {
                switches(x, &mut buf);
                buf[j]
            });
            if r > a && r < b {
                roots.push(r);
            }
        }
    }
    sort_dedup(&mut roots, 1e-14);
    roots
}

fn illinois<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, mut f: F) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            // the secant landed on an end: bisect instead
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = Rule::standard();
        // exact up to degree 31
        let v = r.integrate(0.0, 2.0, |x| x.powi(31));
        let exact = 2f64.powi(32) / 32.0;
        assert!((v - exact).abs() / exact < 1e-13);
        let w: f64 = r.points(-1.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_to_rounding() {
        let v = Rule::standard().integrate(0.0, 1.0, |x| (2.0 * x).exp());
        let exact = (2f64.exp() - 1.0) / 2.0;
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn periodic_breaks_cover_window() {
        let b = periodic_breaks(0.25, 1.25, [0.1, 0.5, 0.25]);
        assert_eq!(b.len(), 4);
        assert!((b[1] - 0.5).abs() < 1e-15 && (b[2] - 1.1).abs() < 1e-15);
    }

    #[test]
    fn linear_switch_root_is_exact() {
        let r = switch_roots(0.02, 0.03, SWITCH_PROBES, 1, |x, out| out[0] = 0.0026 + 5.85 * (x - 0.02) - x);
        let exact = (0.0026 - 5.85 * 0.02) / (1.0 - 5.85);
        assert_eq!(r.len(), 1);
        assert!((r[0] - exact).abs() < 1e-15, "{} {exact}", r[0]);
    }

    #[test]
    fn switch_roots_find_kinks() {
        let roots = switch_roots(0.0, 1.0, SWITCH_PROBES, 2, |x, out| {
            out[0] = x - 0.3;
            out[1] = (x - 0.7) * (x + 2.0);
        });
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 0.3).abs() < 1e-14);
        assert!((roots[1] - 0.7).abs() < 1e-14);
    }
}
