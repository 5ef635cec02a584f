use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    /// Distance to failure; nonnegative iff the check passes.
    pub margin: f64,
    pub pass: bool,
    /// Reported only; does not affect the exit status.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn with_margin(name: &str, value: f64, margin: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: None,
            tolerance: None,
            margin,
            pass: margin >= 0.0,
            informational: false,
            note: None,
        }
    }

    /// |value − target| ≤ tolerance.
    pub fn within(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            target: Some(target),
            tolerance: Some(tolerance),
            ..Self::with_margin(name, value, tolerance - (value - target).abs())
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            target: Some(bound),
            ..Self::with_margin(name, value, value - bound)
        }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            target: Some(bound),
            ..Self::with_margin(name, value, bound - value)
        }
    }

    /// A count of failures that must be zero.
    pub fn none_of(name: &str, failures: usize, total: usize) -> Self {
        Self {
            target: Some(0.0),
            note: Some(format!("{failures} of {total}")),
            ..Self::with_margin(name, failures as f64, -(failures as f64))
        }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self::with_margin(name, v, v - 1.0)
    }

    pub fn failed(name: &str, err: &anyhow::Error) -> Self {
        Self {
            note: Some(format!("{err:#}")),
            ..Self::with_margin(name, f64::NAN, -1.0)
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn fails(&self) -> bool {
        !self.pass && !self.informational
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub flags: Vec<String>,
    pub data: BTreeMap<String, Value>,
    pub series: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Runs a fallible group of checks; an error becomes a failed check named `name`.
    pub fn attempt(&mut self, name: &str, f: impl FnOnce(&mut Self) -> anyhow::Result<()>) {
        if let Err(e) = f(self) {
            self.checks.push(Check::failed(name, &e));
        }
    }

    pub fn data(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.data.insert(key.into(), v);
    }

    pub fn failing(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| c.fails())
            .map(|c| format!("{}: {}", self.suite, c.name))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub passed: bool,
    pub failing: Vec<String>,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(config: RunConfig, suites: Vec<SuiteReport>) -> Self {
        let failing: Vec<String> = suites.iter().flat_map(|s| s.failing()).collect();
        Self {
            config,
            passed: failing.is_empty(),
            failing,
            suites,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub workers: usize,
    pub elapsed_seconds: BTreeMap<String, f64>,
}
