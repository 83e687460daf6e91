//! Verification reports: canonical JSON (sorted keys) and CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::closedform::HemConstant;
use crate::error::{HemError, Result};
use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Ran, but too few samples to decide.
    Inconclusive,
    /// Informational quantity, nothing asserted.
    Report,
}

impl CheckStatus {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
            CheckStatus::Report => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// The identity under test, written out as a formula.
    pub citation: String,
    pub stated: Option<f64>,
    pub oracle: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: CheckStatus,
    pub detail: String,
    pub runtime_ms: u64,
}

impl Check {
    pub fn new(id: impl Into<String>, citation: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            citation: citation.into(),
            stated: None,
            oracle: None,
            tolerance: None,
            status: CheckStatus::Report,
            detail: String::new(),
            runtime_ms: 0,
        }
    }

    /// Relative comparison `|oracle − stated| ≤ tol·|stated|`.
    pub fn relative(mut self, stated: f64, oracle: f64, tol: f64) -> Self {
        let err = relative_error(stated, oracle);
        self.stated = Some(stated);
        self.oracle = Some(oracle);
        self.tolerance = Some(tol);
        self.status = CheckStatus::from_bool(err <= tol);
        self.detail = format!("relative error {err:.3e}");
        self
    }

    pub fn values(mut self, stated: Option<f64>, oracle: Option<f64>, tol: Option<f64>) -> Self {
        self.stated = stated;
        self.oracle = oracle;
        self.tolerance = tol;
        self
    }

    pub fn status(mut self, status: CheckStatus) -> Self {
        self.status = status;
        self
    }

    pub fn passed(self, ok: bool) -> Self {
        self.status(CheckStatus::from_bool(ok))
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Failed check carrying the error that prevented the computation.
    pub fn errored(self, err: &HemError) -> Self {
        self.status(CheckStatus::Fail).detail(format!("error: {err}"))
    }
}

pub fn relative_error(stated: f64, oracle: f64) -> f64 {
    if stated == 0.0 {
        oracle.abs()
    } else {
        ((oracle - stated) / stated).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub version: String,
    pub build: String,
}

impl Environment {
    pub fn current(seed: u64) -> Self {
        Self {
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            build: option_env!("HEM_BUILD_HASH").unwrap_or("unknown").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub environment: Environment,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        Self { suite: suite.into(), checks: Vec::new(), environment: Environment::current(seed) }
    }

    /// No check failed. Inconclusive and informational checks do not count
    /// against the status.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn status(&self) -> &'static str {
        if !self.passed() {
            "fail"
        } else if self.checks.iter().any(|c| c.status == CheckStatus::Inconclusive) {
            "inconclusive"
        } else {
            "pass"
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["status"] = serde_json::Value::String(self.status().to_string());
        v
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        canonical_json(&self.to_json_value())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "status", "stated", "oracle", "tolerance", "detail", "citation"]).map_err(io_err)?;
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for c in &self.checks {
            w.write_record([
                c.id.as_str(),
                c.status.as_str(),
                &num(c.stated),
                &num(c.oracle),
                &num(c.tolerance),
                c.detail.as_str(),
                c.citation.as_str(),
            ])
            .map_err(io_err)?;
        }
        String::from_utf8(w.into_inner().map_err(io_err)?).map_err(io_err)
    }

    /// Writes `path` (JSON) and `path` with a `.csv` extension.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(io_err)?;
        std::fs::write(path.with_extension("csv"), self.to_csv()?).map_err(io_err)
    }
}

pub fn io_err(e: impl std::fmt::Display) -> HemError {
    HemError::Io(e.to_string())
}

/// Serializes with object keys in sorted order (serde_json's default map is
/// ordered).
pub fn canonical_json(v: &serde_json::Value) -> String {
    let sorted: serde_json::Value = serde_json::from_str(&v.to_string()).expect("round trip");
    serde_json::to_string_pretty(&sorted).expect("serializable") + "\n"
}

/// Drops `runtime_ms` fields so two runs can be compared byte for byte.
pub fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("runtime_ms");
            for x in map.values_mut() {
                strip_timing(x);
            }
        }
        serde_json::Value::Array(xs) => xs.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// JSON record for one HEM constant.
pub fn constant_json(c: &HemConstant, p: &Params, citation: &str) -> serde_json::Value {
    serde_json::json!({
        "label": c.label.as_str(),
        "params": p,
        "stated": c.stated,
        "chained": c.chained,
        "ratio": c.ratio(),
        "phase": c.phase.to_string(),
        "citations": [citation],
    })
}

/// CSV table of constants over a parameter sweep.
pub fn constants_csv(rows: &[(Params, HemConstant)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "gamma", "mu", "muL", "muR", "constant_label", "stated_re", "stated_im", "chained_re", "chained_im",
    ])
    .map_err(io_err)?;
    for (p, c) in rows {
        w.write_record([
            p.gamma.to_string(),
            p.mu.to_string(),
            p.mu_l.to_string(),
            p.mu_r.to_string(),
            c.label.to_string(),
            c.stated.to_string(),
            "0".into(),
            c.chained.to_string(),
            "0".into(),
        ])
        .map_err(io_err)?;
    }
    String::from_utf8(w.into_inner().map_err(io_err)?).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_sorted_and_status_is_conjunction() {
        let mut r = VerificationReport::new("demo", 7);
        r.checks.push(Check::new("b", "x = y").relative(1.0, 1.0 + 1e-9, 1e-6));
        r.checks.push(Check::new("a", "x = z").status(CheckStatus::Inconclusive));
        assert!(r.passed());
        assert_eq!(r.status(), "inconclusive");
        let s = r.to_json();
        let keys: Vec<usize> = ["  \"checks\"", "  \"environment\"", "  \"status\"", "  \"suite\""]
            .iter()
            .map(|k| s.lines().position(|l| l.starts_with(k)).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        r.checks.push(Check::new("c", "u = v").relative(1.0, 2.0, 1e-6));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn timing_is_strippable() {
        let mut c = Check::new("a", "x = y");
        c.runtime_ms = 12;
        let mut v = serde_json::to_value(&c).unwrap();
        strip_timing(&mut v);
        assert!(v.get("runtime_ms").is_none());
    }
}
