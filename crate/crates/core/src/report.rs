//! JSON run reports with per-check pass/fail status.
//!
//! The report body depends only on the configuration and seed; the
//! `timestamp` field is the only part that varies between identical runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::{Error, Result};

pub const SCHEMA: &str = "loopint-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    /// Process exit code: 0 pass, 2 tolerance failure, 3 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Inconclusive => 3,
        }
    }
}

/// One compared quantity: `|value - reference| <= tolerance` passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let error = (value - reference).abs();
        let status = if error <= tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), value, reference, error, tolerance, status }
    }

    /// A check whose `error` is already computed, e.g. a z-score or residual.
    pub fn bounded(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        let status = if error <= tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), value: error, reference: 0.0, error, tolerance, status }
    }

    pub fn inconclusive(mut self) -> Self {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: RunConfig,
    pub config_fingerprint: String,
    pub seed: u64,
    /// SHA-256 keys of the spectral models used
    pub fingerprints: BTreeMap<String, String>,
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub status: Status,
    pub timestamp: u64,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            config: config.clone(),
            config_fingerprint: config.fingerprint(),
            seed: config.seed,
            fingerprints: BTreeMap::new(),
            results: BTreeMap::new(),
            checks: Vec::new(),
            status: Status::Pass,
            timestamp: std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.results.insert(key.into(), v);
    }

    pub fn check(&mut self, c: Check) {
        self.status = self.status.max(c.status);
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The JSON without its timestamp, identical across reruns.
    pub fn body(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timestamp");
        }
        serde_json::to_string_pretty(&v).expect("values serialize")
    }

    /// Writes `<dir>/<command>.json` and returns its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.json", self.command));
        std::fs::write(&path, self.to_json())?;
        Ok(path)
    }
}

fn require<'a>(m: &'a serde_json::Map<String, Value>, key: &str, ok: fn(&Value) -> bool) -> Result<&'a Value> {
    m.get(key)
        .filter(|v| ok(v))
        .ok_or_else(|| Error::InvalidArgument(format!("report field '{key}' missing or mistyped")))
}

/// Checks that `v` has the shape of a [`Report`] and that its status agrees with its checks.
pub fn validate_report(v: &Value) -> Result<()> {
    let m = v.as_object().ok_or_else(|| Error::InvalidArgument("report is not an object".into()))?;
    if require(m, "schema", Value::is_string)?.as_str() != Some(SCHEMA) {
        return Err(Error::InvalidArgument("unknown report schema".into()));
    }
    require(m, "command", Value::is_string)?;
    require(m, "config", Value::is_object)?;
    let fp = require(m, "config_fingerprint", Value::is_string)?.as_str().unwrap_or("");
    if fp.len() != 64 || !fp.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidArgument("config_fingerprint is not a SHA-256 hex digest".into()));
    }
    require(m, "seed", Value::is_u64)?;
    require(m, "fingerprints", Value::is_object)?;
    require(m, "results", Value::is_object)?;
    let report: Report =
        serde_json::from_value(v.clone()).map_err(|e| Error::InvalidArgument(format!("report: {e}")))?;
    let worst = report.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
    if worst != report.status {
        return Err(Error::InvalidArgument("report status disagrees with its checks".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_worst_check_and_validates() {
        let mut r = Report::new("index", &RunConfig::default());
        r.check(Check::within("a", 1.0, 1.0 + 1e-9, 1e-8));
        assert_eq!(r.status, Status::Pass);
        r.check(Check::bounded("z", 2.0, 3.0).inconclusive());
        assert_eq!(r.status, Status::Inconclusive);
        r.check(Check::within("b", 0.0, 1.0, 1e-3));
        assert_eq!(r.status.exit_code(), 2);
        r.result("values", [1.0, 2.0]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        validate_report(&v).unwrap();
        let mut bad = v.clone();
        bad["status"] = Value::from("pass");
        assert!(validate_report(&bad).is_err());
        let mut bad = v;
        bad.as_object_mut().unwrap().remove("seed");
        assert!(validate_report(&bad).is_err());
    }

    #[test]
    fn body_ignores_timestamp() {
        let mut a = Report::new("props", &RunConfig::default());
        let mut b = a.clone();
        b.timestamp += 100;
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(a.body(), b.body());
        a.result("x", 1);
        assert_ne!(a.body(), b.body());
    }
}
