//! Residual tables and verdicts shared by every check.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Consistent,
    Vacuous,
    Violation,
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Whether the verdict forces a failing exit status.
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Violation)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Consistent => "CONSISTENT",
            Verdict::Vacuous => "VACUOUS",
            Verdict::Violation => "VIOLATION",
            Verdict::Skipped => "SKIPPED",
        };
        f.pad(s)
    }
}

/// How the outermost derivative of a residual was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    #[default]
    Jet,
    /// Outermost horizontal derivative by Richardson-extrapolated central
    /// differences along the horizontal lift.
    FiniteDifference,
}

/// Location of the worst residual: sample number and tensor index tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Worst {
    pub sample: usize,
    pub index: Vec<usize>,
}

impl Worst {
    pub fn at(sample: usize) -> Worst {
        Worst {
            sample,
            index: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    /// Sup residual over samples and indices (for lower-bound checks, the
    /// observed minimum).
    pub value: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub worst: Option<Worst>,
    pub mode: DerivativeMode,
    pub description: String,
}

impl Residual {
    pub fn new(name: &str, tolerance: f64, description: &str) -> Residual {
        Residual {
            name: name.to_string(),
            value: 0.0,
            tolerance,
            verdict: Verdict::Pass,
            worst: None,
            mode: DerivativeMode::Jet,
            description: description.to_string(),
        }
    }

    /// Record an observation; keeps the maximum and where it occurred.
    pub fn observe(&mut self, value: f64, sample: usize, index: &[usize]) {
        let v = if value.is_nan() { f64::MAX } else { value.min(f64::MAX) };
        if self.worst.is_none() || v > self.value {
            self.value = v;
            self.worst = Some(Worst {
                sample,
                index: index.to_vec(),
            });
        }
    }

    pub fn set(&mut self, value: f64, worst: Worst) {
        self.value = if value.is_finite() { value } else { f64::MAX.copysign(value) };
        self.worst = Some(worst);
    }

    /// Verdict for an upper-bound check: pass iff `value < tolerance`.
    pub fn finish_upper(&mut self) {
        self.verdict = Verdict::from_bool(self.value < self.tolerance);
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_failure()
    }
}

/// Residual table of one check over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub sample_count: usize,
    pub residuals: Vec<Residual>,
    /// Informational verdicts (classifications); they never fail a run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<Condition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub audit: Vec<AuditRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Present when the check was not executed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl CheckReport {
    pub fn new(check: &str, sample_count: usize) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            sample_count,
            residuals: Vec::new(),
            conditions: Vec::new(),
            audit: Vec::new(),
            notes: Vec::new(),
            skipped: None,
        }
    }

    pub fn skipped(check: &str, reason: &str) -> CheckReport {
        CheckReport {
            skipped: Some(reason.to_string()),
            ..CheckReport::new(check, 0)
        }
    }

    pub fn residual(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.residuals.iter().all(Residual::passed) && self.audit.iter().all(|a| !a.status.is_failure())
    }

    pub fn audit_row(&self, implication: &str) -> Option<&AuditRow> {
        self.audit.iter().find(|a| a.implication == implication)
    }

    pub fn has_failure(&self) -> bool {
        !self.all_passed()
    }
}

/// One implication audited over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub implication: String,
    pub hypotheses: Vec<Condition>,
    pub conclusions: Vec<Condition>,
    pub status: Verdict,
}

/// A named condition evaluated as `residual < tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl Condition {
    pub fn upper(name: &str, residual: f64, tolerance: f64) -> Condition {
        Condition {
            name: name.to_string(),
            residual,
            tolerance,
            holds: residual < tolerance,
        }
    }

    /// A structural fact (dimension bound, family membership).
    pub fn fact(name: &str, holds: bool) -> Condition {
        Condition {
            name: name.to_string(),
            residual: if holds { 0.0 } else { 1.0 },
            tolerance: 0.5,
            holds,
        }
    }
}

impl AuditRow {
    pub fn evaluate(implication: &str, hypotheses: Vec<Condition>, conclusions: Vec<Condition>) -> AuditRow {
        let status = if !hypotheses.iter().all(|c| c.holds) {
            Verdict::Vacuous
        } else if conclusions.iter().all(|c| c.holds) {
            Verdict::Consistent
        } else {
            Verdict::Violation
        };
        AuditRow {
            implication: implication.to_string(),
            hypotheses,
            conclusions,
            status,
        }
    }
}
