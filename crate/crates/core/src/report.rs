//! Verification reports shared by the CLI and the demo.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated (runtime or numeric failure).
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub status: Status,
    /// Canonical rendering of the residual, or a numeric summary.
    pub residual: String,
    /// Wall time; kept out of serialized output so reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Check {
    pub fn new(id: impl Into<String>, description: impl Into<String>, pass: bool, residual: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            residual: residual.into(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn error(id: impl Into<String>, description: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            status: Status::Error,
            residual: message.into(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn has_errors(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Error)
    }

    /// Sorts checks by id so output order never depends on evaluation order.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {}\n", self.scenario);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let _ = writeln!(out, "{tag:5} {:28} {}", c.id, c.description);
            if c.status != Status::Pass || !c.residual.is_empty() {
                let _ = writeln!(out, "      residual: {}", c.residual);
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}
