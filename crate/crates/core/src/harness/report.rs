//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::experiments::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// value < threshold
    Lt,
    /// value ≤ threshold
    Le,
    /// value > threshold
    Gt,
    /// value ≥ threshold
    Ge,
}

impl Relation {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::Lt => value < threshold,
            Relation::Le => value <= threshold,
            Relation::Gt => value > threshold,
            Relation::Ge => value >= threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "≤",
            Relation::Gt => ">",
            Relation::Ge => "≥",
        }
    }
}

/// One thresholded statistic. `pass` is always `relation(value, threshold)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Non-gating checks are reported but do not decide the report.
    pub gating: bool,
}

/// An estimate without a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub schema_version: u32,
    pub experiment: String,
    /// Acceptance criterion this preset decides, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u32>,
    pub config: ExperimentConfig,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Why the experiment could not be completed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
    pub artifact_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl StatReport {
    /// Pass iff no cause is recorded and every gating check passes.
    pub fn recompute_pass(&self) -> bool {
        self.cause.is_none() && self.checks.iter().all(|c| !c.gating || c.relation.holds(c.value, c.threshold))
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for StatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match self.criterion {
            Some(c) => writeln!(f, "[{verdict}] criterion {c}: {}", self.experiment)?,
            None => writeln!(f, "[{verdict}] {}", self.experiment)?,
        }
        if let Some(cause) = &self.cause {
            writeln!(f, "    cause: {cause}")?;
        }
        for c in &self.checks {
            let mark = if c.pass { "ok" } else { "FAILED" };
            let tag = if c.gating { "" } else { " (diagnostic)" };
            writeln!(
                f,
                "    {mark:6} {} = {:.6e} {} {:.6e}{tag}",
                c.name,
                c.value,
                c.relation.symbol(),
                c.threshold
            )?;
        }
        Ok(())
    }
}

/// Accumulates checks, applying tolerance overrides by check name.
#[derive(Debug, Default)]
pub struct ReportBuilder {
    overrides: BTreeMap<String, f64>,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
}

impl ReportBuilder {
    pub fn new(overrides: &BTreeMap<String, f64>) -> Self {
        ReportBuilder {
            overrides: overrides.clone(),
            ..Default::default()
        }
    }

    fn push(&mut self, name: &str, value: f64, threshold: f64, relation: Relation, gating: bool) {
        let threshold = self.overrides.get(name).copied().unwrap_or(threshold);
        self.checks.push(Check {
            name: name.to_string(),
            value,
            threshold,
            relation,
            pass: relation.holds(value, threshold),
            gating,
        });
    }

    pub fn gate(&mut self, name: &str, value: f64, relation: Relation, threshold: f64) {
        self.push(name, value, threshold, relation, true);
    }

    pub fn diagnostic(&mut self, name: &str, value: f64, relation: Relation, threshold: f64) {
        self.push(name, value, threshold, relation, false);
    }

    pub fn estimate(&mut self, name: &str, value: f64, std_error: Option<f64>) {
        self.estimates.push(Estimate {
            name: name.to_string(),
            value,
            std_error,
        });
    }

    pub fn finish(self, config: &ExperimentConfig, cause: Option<String>) -> StatReport {
        let mut r = StatReport {
            schema_version: SCHEMA_VERSION,
            experiment: config.experiment.name().to_string(),
            criterion: config.experiment.criterion(),
            config: config.clone(),
            estimates: self.estimates,
            checks: self.checks,
            pass: false,
            cause,
            artifact_version: ARTIFACT_VERSION.to_string(),
            runtime_ms: None,
        };
        r.pass = r.recompute_pass();
        r
    }
}
