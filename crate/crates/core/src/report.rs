//! Verification report records and their JSON form.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    /// Value stated in the source derivation.
    Paper,
    /// Follows from the definitions alone.
    Trivial,
    /// Computed by an independent oracle.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A documented discrepancy with the source; never counted as failure.
    Finding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub module: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// A check whose status follows from `|measured − expected| ≤ tolerance`.
    pub fn compare(
        module: &str,
        name: &str,
        measured: f64,
        expected: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        let status = if (measured - expected).abs() <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.to_string(),
            module: module.to_string(),
            measured,
            expected,
            tolerance,
            provenance,
            status,
            detail: None,
        }
    }

    pub fn finding(module: &str, name: &str, measured: f64, expected: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            module: module.to_string(),
            measured,
            expected,
            tolerance: 0.0,
            provenance: Provenance::Paper,
            status: Status::Finding,
            detail: Some(detail.into()),
        }
    }

    /// A check that could not be evaluated.
    pub fn errored(module: &str, name: &str, expected: f64, provenance: Provenance, err: &crate::Error) -> Self {
        Self {
            name: name.to_string(),
            module: module.to_string(),
            measured: f64::NAN,
            expected,
            tolerance: 0.0,
            provenance,
            status: Status::Fail,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub findings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(config: RunConfig, seed: u64, checks: Vec<Check>) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            total: checks.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            findings: count(Status::Finding),
        };
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            checks,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_from_tolerance() {
        assert_eq!(Check::compare("m", "a", 1.0, 1.0 + 1e-9, 1e-8, Provenance::Trivial).status, Status::Pass);
        assert_eq!(Check::compare("m", "a", 1.0, 1.1, 1e-8, Provenance::Trivial).status, Status::Fail);
        assert_eq!(Check::compare("m", "a", f64::NAN, 1.0, 1.0, Provenance::Trivial).status, Status::Fail);
    }

    #[test]
    fn summary_counts() {
        let checks = vec![
            Check::compare("m", "a", 1.0, 1.0, 0.0, Provenance::Paper),
            Check::compare("m", "b", 2.0, 1.0, 0.0, Provenance::Derived),
            Check::finding("m", "c", 1.25, 1.166, "gap"),
        ];
        let r = VerificationReport::new(RunConfig::default(), 42, checks);
        assert_eq!(r.summary, Summary { total: 3, passed: 1, failed: 1, findings: 1 });
        assert!(!r.all_passed());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"][0]["provenance"], "PAPER");
        assert_eq!(v["checks"][2]["status"], "finding");
        assert!(v["checks"][0].get("detail").is_none());
    }
}
