use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

/// Claim keys a report may certify.
pub const CLAIMS: [&str; 7] = ["prop1", "prop2", "thm3", "prop3", "prop4", "prop5", "mclean"];

/// A residual measured against a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual < tolerance`; a NaN residual fails.
    pub fn below(residual: f64, tolerance: f64) -> Self {
        Self {
            residual,
            tolerance,
            pass: residual < tolerance,
        }
    }

    pub fn failed(residual: f64, tolerance: f64) -> Self {
        Self {
            residual,
            tolerance,
            pass: false,
        }
    }
}

/// The `report.json` body. Maps are ordered and nothing time-dependent is
/// recorded, so reruns produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub claims: BTreeMap<String, Check>,
    pub checks: BTreeMap<String, Check>,
    pub inputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub files: Vec<String>,
    #[serde(flatten)]
    pub results: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            pass: true,
            claims: BTreeMap::new(),
            checks: BTreeMap::new(),
            inputs: Value::Null,
            error: None,
            files: Vec::new(),
            results: Map::new(),
        }
    }

    pub fn claim(&mut self, key: &str, check: Check) {
        debug_assert!(CLAIMS.contains(&key), "unknown claim key {key}");
        self.claims.insert(key.to_string(), check);
    }

    pub fn check(&mut self, key: &str, check: Check) {
        self.checks.insert(key.to_string(), check);
    }

    /// Attach a serializable result under `key` at the top level.
    pub fn result<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.results.insert(key.to_string(), v);
    }

    /// Record a pipeline failure; the report still gets written.
    pub fn fail(&mut self, message: String) {
        self.error = Some(message);
    }

    /// Recompute the overall flag from the claims, checks and error.
    pub fn finish(&mut self) {
        self.pass = self.error.is_none()
            && self.claims.values().all(|c| c.pass)
            && self.checks.values().all(|c| c.pass);
    }
}
