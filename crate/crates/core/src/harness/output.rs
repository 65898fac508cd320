//! Output records, CSV tables and JSON files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::dynamics::CollisionEvent;
use crate::error::Result;

/// One checked inequality: `measured ≤ constant` passes with
/// `slack = constant − measured ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub inequality: String,
    pub constant: f64,
    pub measured: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(id: &str, inequality: &str, measured: f64, constant: f64) -> Self {
        let slack = constant - measured;
        Verdict {
            id: id.into(),
            inequality: inequality.into(),
            constant,
            measured,
            slack,
            pass: slack >= 0.0 && measured.is_finite(),
        }
    }

    /// A yes/no property, reported as `violations ≤ 0`.
    pub fn holds(id: &str, inequality: &str, violations: usize) -> Self {
        Self::at_most(id, inequality, violations as f64, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t: f64,
    pub regime: String,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub energy: f64,
    pub hamiltonian: f64,
    pub momentum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub transport: f64,
    pub excess: f64,
    /// Upper bound through the H¹ distance.
    pub h1_bound: f64,
    /// Seed the best plan descended from.
    pub plan: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub n: usize,
    pub error: f64,
    pub mass: f64,
    pub exact_mass: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub scenario: Option<Scenario>,
    pub samples: Vec<SampleRow>,
    pub events: Vec<CollisionEvent>,
    pub metric: Vec<MetricRow>,
    pub approx: Vec<ApproxRow>,
    pub verdicts: Vec<Verdict>,
}

impl OutputRecord {
    pub fn new(command: &str, scenario: Option<&Scenario>) -> Self {
        OutputRecord {
            command: command.into(),
            scenario: scenario.cloned(),
            ..Default::default()
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("t,regime,peakon,p,q\n");
        for r in &self.samples {
            for (k, (p, q)) in r.p.iter().zip(&r.q).enumerate() {
                writeln!(out, "{},{},{k},{},{}", num(r.t), r.regime, num(*p), num(*q)).unwrap();
            }
        }
        out
    }

    pub fn conservation_csv(&self) -> String {
        let mut out = String::from("t,regime,energy,hamiltonian,momentum\n");
        for r in &self.samples {
            writeln!(out, "{},{},{},{},{}", num(r.t), r.regime, num(r.energy), num(r.hamiltonian), num(r.momentum)).unwrap();
        }
        out
    }

    pub fn events_csv(&self) -> String {
        let mut out = String::from("tau,qbar,atom\n");
        for e in &self.events {
            writeln!(out, "{},{},{}", num(e.tau), num(e.qbar), num(e.atom)).unwrap();
        }
        out
    }

    pub fn metric_csv(&self) -> String {
        let mut out = String::from("t,lower,upper,transport,excess,h1_bound,plan\n");
        for r in &self.metric {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(r.t),
                num(r.lower),
                num(r.upper),
                num(r.transport),
                num(r.excess),
                num(r.h1_bound),
                r.plan
            )
            .unwrap();
        }
        out
    }

    pub fn approx_csv(&self) -> String {
        let mut out = String::from("n,error,mass,exact_mass\n");
        for r in &self.approx {
            writeln!(out, "{},{},{},{}", r.n, num(r.error), num(r.mass), num(r.exact_mass)).unwrap();
        }
        out
    }

    /// Writes `record.json`, `verdicts.json` and the CSV tables that have
    /// rows into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("record.json"), serde_json::to_string_pretty(self)? + "\n")?;
        fs::write(dir.join("verdicts.json"), serde_json::to_string_pretty(&self.verdicts)? + "\n")?;
        if !self.samples.is_empty() {
            fs::write(dir.join("trajectory.csv"), self.trajectory_csv())?;
            fs::write(dir.join("conservation.csv"), self.conservation_csv())?;
            fs::write(dir.join("events.csv"), self.events_csv())?;
        }
        if !self.metric.is_empty() {
            fs::write(dir.join("metric.csv"), self.metric_csv())?;
        }
        if !self.approx.is_empty() {
            fs::write(dir.join("approx.csv"), self.approx_csv())?;
        }
        Ok(())
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_slack_sign() {
        assert!(Verdict::at_most("a", "x <= 1", 0.5, 1.0).pass);
        assert!(!Verdict::at_most("a", "x <= 1", 1.5, 1.0).pass);
        assert!(!Verdict::at_most("a", "x <= 1", f64::NAN, 1.0).pass);
        assert!(Verdict::holds("b", "no violations", 0).pass);
        assert!(!Verdict::holds("b", "no violations", 2).pass);
    }

    #[test]
    fn csv_numbers_round_trip() {
        let x = 0.1 + 0.2;
        let s = num(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        let mut r = OutputRecord::new("approx", None);
        r.approx.push(ApproxRow { n: 8, error: x, mass: 0.0, exact_mass: 0.0 });
        assert_eq!(r.approx_csv().lines().count(), 2);
    }
}
