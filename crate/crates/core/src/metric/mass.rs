//! Cumulative lifted mass `M(x) = ∫₀ˣ (1 + u_x²)`.

use crate::kernel::{chi_prime_branch, PeakonState};
use crate::quadrature::Rule;

/// Subintervals per peak-to-peak panel.
const SUBDIVISIONS: usize = 48;

/// Tabulated `M` on `[0, 1]` with exact node values and one-sided slopes;
/// cubic Hermite in between, extended by `M(x + 1) = M(x) + T`.
#[derive(Clone, Debug)]
pub struct Cumulative {
    xs: Vec<f64>,
    ms: Vec<f64>,
    // (right slope at xs[j], left slope at xs[j+1])
    slopes: Vec<(f64, f64)>,
}

fn left_slope(s: &PeakonState, x: f64) -> f64 {
    let mut ux = 0.0;
    for (&p, &q) in s.p.iter().zip(&s.q) {
        let r = (x - q).rem_euclid(1.0);
        let r = if r == 0.0 || r >= 1.0 { 1.0 } else { r };
        ux += p * chi_prime_branch(r);
    }
    1.0 + ux * ux
}

impl Cumulative {
    pub fn new(s: &PeakonState) -> Self {
        let rule = Rule::standard();
        let density = |x: f64| 1.0 + s.value(x).1.powi(2);
        let mut xs = Vec::new();
        for w in s.breaks_from(0.0).windows(2) {
            for k in 0..SUBDIVISIONS {
                xs.push(w[0] + (w[1] - w[0]) * k as f64 / SUBDIVISIONS as f64);
            }
        }
        xs.push(1.0);
        let mut ms = vec![0.0];
        let mut slopes = Vec::with_capacity(xs.len() - 1);
        for w in xs.windows(2) {
            ms.push(ms[ms.len() - 1] + rule.integrate(w[0], w[1], density));
            slopes.push((density(w[0]), left_slope(s, w[1])));
        }
        Cumulative { xs, ms, slopes }
    }

    /// `T = M(1) = 1 + ∫₀¹ u_x²`.
    pub fn total(&self) -> f64 {
        self.ms[self.ms.len() - 1]
    }

    fn cell(&self, j: usize, x: f64) -> (f64, f64) {
        let (x0, x1) = (self.xs[j], self.xs[j + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (d0, d1) = self.slopes[j];
        let (m0, m1) = (self.ms[j], self.ms[j + 1]);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let m = h00 * m0 + h10 * h * d0 + h01 * m1 + h11 * h * d1;
        let dm = (6.0 * t * t - 6.0 * t) * (m0 - m1) / h
            + (1.0 - 4.0 * t + 3.0 * t * t) * d0
            + (3.0 * t * t - 2.0 * t) * d1;
        (m, dm)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = x.floor();
        let r = x - n;
        let j = (self.xs.partition_point(|&v| v <= r).max(1) - 1).min(self.xs.len() - 2);
        self.cell(j, r).0 + n * self.total()
    }

    /// `M⁻¹(m)`.
    pub fn inverse(&self, m: f64) -> f64 {
        let t = self.total();
        let n = (m / t).floor();
        let r = m - n * t;
        let j = (self.ms.partition_point(|&v| v <= r).max(1) - 1).min(self.xs.len() - 2);
        let (mut lo, mut hi) = (self.xs[j], self.xs[j + 1]);
        // safeguarded Newton; M is increasing on the cell
        let mut x = lo + (hi - lo) * (r - self.ms[j]) / (self.ms[j + 1] - self.ms[j]);
        for _ in 0..60 {
            let (val, d) = self.cell(j, x);
            let f = val - r;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - f / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) || hi - lo <= 1e-16 {
                x = next;
                break;
            }
            x = next;
        }
        x + n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::energy;
    use crate::quadrature::periodic_breaks;

    fn breaks(s: &PeakonState) -> Vec<f64> {
        periodic_breaks(0.0, 1.0, s.q.iter().copied())
    }

    #[test]
    fn total_mass_and_inverse() {
        let s = PeakonState::new(vec![0.8, -1.9, 0.4], vec![0.1, 0.35, 0.7]).unwrap();
        let c = Cumulative::new(&s);
        let l2 = Rule::standard().integrate_panels(&breaks(&s), |x| s.value(x).0.powi(2));
        assert!((c.total() - (1.0 + energy(&s) - l2)).abs() < 1e-12);
        for k in 0..200 {
            let x = -0.5 + k as f64 / 97.0;
            let m = c.eval(x);
            assert!((c.inverse(m) - x).abs() < 1e-12, "x = {x}");
        }
        // against direct quadrature
        for &x in &[0.05, 0.2, 0.5, 0.93] {
            let mut b = periodic_breaks(0.0, x, s.q.iter().copied());
            b.dedup();
            let direct = Rule::standard().integrate_panels(&b, |y| 1.0 + s.value(y).1.powi(2));
            assert!((c.eval(x) - direct).abs() < 1e-8, "{} {direct}", c.eval(x));
        }
    }

    #[test]
    fn empty_profile_is_lebesgue() {
        let c = Cumulative::new(&PeakonState::empty());
        assert!((c.total() - 1.0).abs() < 1e-15);
        assert!((c.eval(0.3) - 0.3).abs() < 1e-15);
        assert!((c.inverse(2.25) - 2.25).abs() < 1e-15);
    }
}
