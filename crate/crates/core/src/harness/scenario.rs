//! Scenario files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::approx::{datum, multipeakon_approx};
use crate::dynamics::SolverConfig;
use crate::error::{Error, Result};
use crate::kernel::PeakonState;
use crate::metric::OptimizeOptions;

pub const SCHEMA: u32 = 1;

/// Initial data: an explicit peakon list or a corpus datum sampled with `n`
/// peakons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    Peakons { peakons: Vec<(f64, f64)> },
    Datum { datum: String, n: usize },
}

impl Initial {
    pub fn state(&self) -> Result<PeakonState> {
        match self {
            Initial::Peakons { peakons } => {
                let (p, q) = peakons.iter().copied().unzip();
                PeakonState::new(p, q)
            }
            Initial::Datum { datum: label, n } => multipeakon_approx(&datum(label)?, *n),
        }
    }
}

/// Which seed plans `metric` hands to the optimizer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSuite {
    Identity,
    Cdf,
    Characteristic,
    #[default]
    All,
}

impl SeedSuite {
    pub fn parse(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(name.into()))
            .map_err(|_| Error::InvalidScenario(format!("unknown seed suite `{name}`")))
    }

    pub fn identity(self) -> bool {
        matches!(self, SeedSuite::Identity | SeedSuite::All)
    }

    pub fn cdf(self) -> bool {
        matches!(self, SeedSuite::Cdf | SeedSuite::All)
    }

    pub fn characteristic(self) -> bool {
        matches!(self, SeedSuite::Characteristic | SeedSuite::All)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricSettings {
    #[serde(flatten)]
    pub optimizer: OptimizeOptions,
    /// Breakpoints of the cdf-match and characteristic seeds.
    pub grid: usize,
    pub seeds: SeedSuite,
    /// Growth-rate ceiling for the stability verdict; `None` uses the
    /// Lipschitz bracket at the larger of the two energies.
    pub kappa_max: Option<f64>,
}

impl Default for MetricSettings {
    fn default() -> Self {
        MetricSettings {
            optimizer: OptimizeOptions::default(),
            grid: 64,
            seeds: SeedSuite::All,
            kappa_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxSettings {
    pub datum: String,
    pub n_list: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub initial: Option<Initial>,
    /// Second solution for `metric`.
    #[serde(default)]
    pub partner: Option<Initial>,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    /// Number of output times, including both ends.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub metric: MetricSettings,
    #[serde(default)]
    pub approx: Option<ApproxSettings>,
    /// Drift allowed for E, H and Σp in `simulate`, relative to
    /// `max(|X(0)|, 1)`.
    #[serde(default = "default_drift_tol")]
    pub drift_tol: f64,
}

fn default_t_final() -> f64 {
    1.0
}

fn default_samples() -> usize {
    11
}

fn default_drift_tol() -> f64 {
    1e-4
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.schema != SCHEMA {
            return bad(format!("schema {} is not supported (expected {SCHEMA})", self.schema));
        }
        if !self.t_final.is_finite() {
            return bad(format!("t_final must be finite, got {}", self.t_final));
        }
        if self.samples < 2 {
            return bad("samples must be at least 2".into());
        }
        if !(self.drift_tol > 0.0) {
            return bad("drift_tol must be positive".into());
        }
        self.solver.validate()?;
        for init in self.initial.iter().chain(&self.partner) {
            if let Initial::Datum { datum: label, .. } = init {
                datum(label)?;
            }
        }
        if let Some(a) = &self.approx {
            datum(&a.datum)?;
            if a.n_list.is_empty() || a.n_list.contains(&0) {
                return bad("approx.n_list must be non-empty with every N ≥ 1".into());
            }
        }
        if self.metric.grid < 2 {
            return bad("metric.grid must be at least 2".into());
        }
        if let Some(k) = self.metric.kappa_max {
            if !(k >= 0.0) {
                return bad("metric.kappa_max must be non-negative".into());
            }
        }
        Ok(())
    }

    /// Output times: `samples` equally spaced points from 0 to `t_final`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|k| if k == n { self.t_final } else { self.t_final * k as f64 / n as f64 })
            .collect()
    }

    pub fn initial_state(&self) -> Result<PeakonState> {
        match &self.initial {
            Some(i) => i.state(),
            None => Err(Error::InvalidScenario("scenario has no initial data".into())),
        }
    }

    pub fn partner_state(&self) -> Result<PeakonState> {
        match &self.partner {
            Some(i) => i.state(),
            None => Err(Error::InvalidScenario("metric needs a `partner`".into())),
        }
    }
}
