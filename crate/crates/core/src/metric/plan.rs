//! Strictly increasing piecewise-linear maps with `ψ(x + 1) = ψ(x) + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Breakpoints `(x_k, y_k)`, `k = 0..K`, strictly increasing in both
/// coordinates with `x_{K−1} < x₀ + 1`, `y_{K−1} < y₀ + 1`. The wrap pair
/// `(x₀ + 1, y₀ + 1)` closes the period and is not stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct TransportPlan {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<Vec<(f64, f64)>> for TransportPlan {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        TransportPlan::new(points)
    }
}

impl From<TransportPlan> for Vec<(f64, f64)> {
    fn from(p: TransportPlan) -> Self {
        p.points()
    }
}

fn increasing_period(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) && v[v.len() - 1] < v[0] + 1.0
}

impl TransportPlan {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPlan("no breakpoints".into()));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPlan("non-finite breakpoint".into()));
        }
        if !increasing_period(&xs) || !increasing_period(&ys) {
            return Err(Error::InvalidPlan("breakpoints must increase strictly within one period".into()));
        }
        Ok(TransportPlan { xs, ys })
    }

    pub fn identity() -> Self {
        TransportPlan {
            xs: vec![0.0],
            ys: vec![0.0],
        }
    }

    /// `x ↦ x + d`.
    pub fn shift(d: f64) -> Self {
        TransportPlan {
            xs: vec![0.0],
            ys: vec![d],
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.xs.iter().copied().zip(self.ys.iter().copied()).collect()
    }

    pub(crate) fn set_y(&mut self, k: usize, y: f64) {
        self.ys[k] = y;
    }

    /// Breakpoint `k` for `k ∈ 0..=K`, index `K` being the wrap pair.
    pub fn knot(&self, k: usize) -> (f64, f64) {
        let n = self.len();
        if k < n {
            (self.xs[k], self.ys[k])
        } else {
            (self.xs[k - n] + 1.0, self.ys[k - n] + 1.0)
        }
    }

    /// Linear pieces `(x_a, x_b, y_a, y_b)` covering `[x₀, x₀ + 1]`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.len()).map(|k| {
            let (xa, ya) = self.knot(k);
            let (xb, yb) = self.knot(k + 1);
            (xa, xb, ya, yb)
        })
    }

    fn locate(xs: &[f64], x: f64) -> (f64, usize) {
        let n = (x - xs[0]).floor();
        let r = x - n;
        let k = xs.partition_point(|&v| v <= r).max(1) - 1;
        (n, k)
    }

    /// `ψ(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let (n, k) = Self::locate(&self.xs, x);
        let (xa, ya) = self.knot(k);
        let (xb, yb) = self.knot(k + 1);
        let r = x - n;
        ya + (yb - ya) * ((r - xa) / (xb - xa)) + n
    }

    /// `ψ'(x)`, right-continuous.
    pub fn slope(&self, x: f64) -> f64 {
        let (_, k) = Self::locate(&self.xs, x);
        let (xa, ya) = self.knot(k);
        let (xb, yb) = self.knot(k + 1);
        (yb - ya) / (xb - xa)
    }

    pub fn inverse(&self) -> Self {
        TransportPlan {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TransportPlan) -> Self {
        let inv = inner.inverse();
        let a = inner.xs[0];
        let mut xs: Vec<f64> = inner.xs.clone();
        let (y0, y1) = (inner.ys[0], inner.ys[0] + 1.0);
        for &c in &self.xs {
            let mut y = c + (y0 - c).ceil();
            while y < y1 {
                let x = inv.eval(y);
                if x > a && x < a + 1.0 {
                    xs.push(x);
                }
                y += 1.0;
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|b, a| (*b - *a).abs() <= 1e-14 * (1.0 + a.abs()));
        let ys: Vec<f64> = xs.iter().map(|&x| self.eval(inner.eval(x))).collect();
        TransportPlan { xs, ys }.simplified()
    }

    /// Drops breakpoints across which the slope does not change.
    pub fn simplified(&self) -> Self {
        let n = self.len();
        if n == 1 {
            return self.clone();
        }
        let slope = |k: usize| {
            let (xa, ya) = self.knot(k);
            let (xb, yb) = self.knot(k + 1);
            (yb - ya) / (xb - xa)
        };
        let keep: Vec<usize> = (0..n)
            .filter(|&k| {
                let before = slope((k + n - 1) % n);
                let after = slope(k);
                (after - before).abs() > 1e-12 * (before.abs() + after.abs())
            })
            .collect();
        if keep.is_empty() {
            return TransportPlan {
                xs: vec![self.xs[0]],
                ys: vec![self.ys[0]],
            };
        }
        TransportPlan {
            xs: keep.iter().map(|&k| self.xs[k]).collect(),
            ys: keep.iter().map(|&k| self.ys[k]).collect(),
        }
    }

    /// Same map with extra breakpoints: the longest pieces are bisected
    /// until there are at least `n` breakpoints.
    pub fn refined(&self, n: usize) -> Self {
        let mut xs = self.xs.clone();
        while xs.len() < n {
            let m = xs.len();
            let (k, _) = (0..m)
                .map(|k| {
                    let next = if k + 1 < m { xs[k + 1] } else { xs[0] + 1.0 };
                    (k, next - xs[k])
                })
                .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
            let next = if k + 1 < m { xs[k + 1] } else { xs[0] + 1.0 };
            xs.insert(k + 1, 0.5 * (xs[k] + next));
        }
        let ys = xs.iter().map(|&x| self.eval(x)).collect();
        TransportPlan { xs, ys }
    }
}
