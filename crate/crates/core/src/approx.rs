//! Multipeakon approximation of periodic data.
//!
//! Since `½(χ − χ'') = δ` on the circle, every periodic `f` satisfies
//! `f(x) = ∫₀¹ χ(x − y) (f − f'')(y)/2 dy`. A Riemann sum of this integral
//! over `N` equal cells is a multipeakon profile.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{chi, chi_prime, PeakonState};
use crate::quadrature::{periodic_breaks, Rule};

type Field = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed-form periodic datum with its first and second derivatives.
///
/// Data with kinks carry the point masses of `(f − f'')/2` in `atoms`
/// (`f2` is then the regular part of `f''`) and list the kink locations in
/// `kinks` so that quadrature panels are split there.
#[derive(Clone)]
pub struct SmoothPeriodicDatum {
    pub label: String,
    pub f: Field,
    pub f1: Field,
    pub f2: Field,
    /// `(position, weight)` point masses of `(f − f'')/2`.
    pub atoms: Vec<(f64, f64)>,
    pub kinks: Vec<f64>,
}

impl fmt::Debug for SmoothPeriodicDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothPeriodicDatum")
            .field("label", &self.label)
            .field("atoms", &self.atoms)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl SmoothPeriodicDatum {
    pub fn new<F, F1, F2>(label: &str, f: F, f1: F1, f2: F2) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SmoothPeriodicDatum {
            label: label.to_string(),
            f: Arc::new(f),
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            atoms: Vec::new(),
            kinks: Vec::new(),
        }
    }

    /// `f ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self::new("constant", move |_| c, |_| 0.0, |_| 0.0)
    }

    /// `f(x) = sin(2πx)`.
    pub fn sine() -> Self {
        let k = 2.0 * PI;
        Self::new("sin", move |x| (k * x).sin(), move |x| k * (k * x).cos(), move |x| -k * k * (k * x).sin())
    }

    /// `f(x) = c·χ(x − center)`: a single peakon, `(f − f'')/2 = c δ_center`.
    pub fn chi_bump(c: f64, center: f64) -> Self {
        SmoothPeriodicDatum {
            atoms: vec![(center.rem_euclid(1.0), c)],
            kinks: vec![center],
            ..Self::new(
                "chi-bump",
                move |x| c * chi(x - center),
                move |x| c * chi_prime(x - center),
                move |x| c * chi(x - center),
            )
        }
    }

    /// `∫₀¹ (f − f2)/2` plus the atom weights.
    pub fn total_mass(&self) -> f64 {
        let breaks = periodic_breaks(0.0, 1.0, self.kinks.iter().copied());
        let smooth = Rule::standard().integrate_panels(&breaks, |y| 0.5 * ((self.f)(y) - (self.f2)(y)));
        smooth + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }
}

/// Labels accepted by [`datum`].
pub const CORPUS: [&str; 3] = ["constant", "sin", "chi-bump"];

/// Scenario corpus: `constant` (`f ≡ 1`), `sin` (`sin 2πx`) and `chi-bump`
/// (`χ(x − 1/3)`).
pub fn datum(label: &str) -> Result<SmoothPeriodicDatum> {
    match label {
        "constant" => Ok(SmoothPeriodicDatum::constant(1.0)),
        "sin" => Ok(SmoothPeriodicDatum::sine()),
        "chi-bump" => Ok(SmoothPeriodicDatum::chi_bump(1.0, 1.0 / 3.0)),
        other => Err(Error::UnknownDatum(other.to_string())),
    }
}

/// `pᵢ = ∫_{(i−1)/N}^{i/N} (f − f'')/2`, `qᵢ = (2i − 1)/(2N)`.
pub fn multipeakon_approx(d: &SmoothPeriodicDatum, n: usize) -> Result<PeakonState> {
    if n == 0 {
        return Err(Error::InvalidConfig("multipeakon_approx needs N >= 1".into()));
    }
    let rule = Rule::standard();
    let h = 1.0 / n as f64;
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let breaks = periodic_breaks(a, b, d.kinks.iter().copied());
        let mut pi = rule.integrate_panels(&breaks, |y| 0.5 * ((d.f)(y) - (d.f2)(y)));
        for &(c, w) in &d.atoms {
            let cell = ((c.rem_euclid(1.0) * n as f64).floor() as usize).min(n - 1);
            if cell == i {
                pi += w;
            }
        }
        p.push(pi);
        q.push((2 * i + 1) as f64 * 0.5 * h);
    }
    PeakonState::new(p, q)
}

/// `‖f − Σ pᵢ χ(· − qᵢ)‖_{H¹}` over one period.
pub fn approx_error(d: &SmoothPeriodicDatum, s: &PeakonState) -> f64 {
    let breaks = periodic_breaks(0.0, 1.0, s.q.iter().chain(&d.kinks).copied());
    Rule::standard()
        .integrate_panels(&breaks, |x| {
            let (u, ux) = s.value(x);
            ((d.f)(x) - u).powi(2) + ((d.f1)(x) - ux).powi(2)
        })
        .max(0.0)
        .sqrt()
}
