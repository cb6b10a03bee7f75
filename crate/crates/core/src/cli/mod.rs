//! Batch front-end: configuration, sampling, check orchestration and reports.

mod config;
mod render;
mod sampling;

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub use config::{CheckName, EngineSection, Format, OutputConfig, RunConfig, SampleConfig};
pub use render::{render_text, write_atomic};
pub use sampling::{sample_flags, sample_points, MAX_REJECTION_RATE, Y_MAX, Y_MIN};

use crate::ad::EngineConfig;
use crate::curvature::R2_CONVENTION;
use crate::error::{Error, Result};
use crate::expr::GRAMMAR_VERSION;
use crate::metrics::{validate_structure_with, DomainConstraint};
use crate::report::CheckReport;
use crate::symmetry::{
    analyze, classification_report, constant_flag_report, curvature_report, symmetry_report, theorem_audit,
    AuditInputs,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Where the samples came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub count: usize,
    pub seed: u64,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub y_annulus: [f64; 2],
    pub chart_domain: Vec<DomainConstraint>,
    pub engine: EngineConfig,
}

/// Machine-readable run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub grammar_version: u32,
    /// Seconds since the Unix epoch; the only field that differs between
    /// identical runs.
    pub timestamp: u64,
    pub config: RunConfig,
    pub provenance: Provenance,
    pub r2_convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub checks: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub passed: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<RunReport> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed report: {e}")))
    }
}

/// Executes the requested checks in dependency order. Configuration errors
/// are returned; failures of the structure itself end up in the report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let s = config.structure()?;
    let bounds = config.bounds();
    let engine = EngineConfig::from(config.engine);
    let samples = sample_points(&s, &bounds, config.samples.count, config.samples.seed)?;
    let tol = &config.tolerances;
    let mut errors = Vec::new();
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut halt: Option<String> = None;

    if config.wants(CheckName::Validate) {
        let r = validate_structure_with(&s, &samples, tol)?;
        if r.has_failure() {
            halt = Some("the structure failed validation".into());
        }
        reports.push(r);
    }

    let downstream = CheckName::ALL[1..].iter().any(|c| config.wants(*c));
    let analysis = match (&halt, downstream) {
        (None, true) => match analyze(&s, &samples, engine) {
            Ok(rows) => Some(rows),
            Err(e @ (Error::StructureInvalid(_) | Error::Domain(_) | Error::Numeric(_))) => {
                let msg = format!("analysis failed: {e}");
                errors.push(msg.clone());
                halt = Some(msg);
                None
            }
            Err(e) => return Err(e),
        },
        _ => None,
    };

    let mut lambda = None;
    if let Some(rows) = &analysis {
        let classification = classification_report(rows, tol)?;
        let curvature = curvature_report(rows, tol);
        let flags = sample_flags(&samples, config.samples.flags, config.samples.seed);
        let (flag, fit) = constant_flag_report(rows, &flags, tol)?;
        lambda = Some(fit.lambda);
        let sym = symmetry_report(rows, tol);
        let audit = theorem_audit(&AuditInputs::gather(&classification, &flag, &sym, s.dim())?);
        for (name, report) in [
            (CheckName::Classify, classification),
            (CheckName::Curvature, curvature),
            (CheckName::ConstantFlag, flag),
            (CheckName::Symmetry, sym.report),
            (CheckName::TheoremAudit, audit),
        ] {
            let mut report = report;
            report.sample_count = samples.len();
            reports.push(if config.wants(name) {
                report
            } else {
                CheckReport::skipped(name.as_str(), "not requested")
            });
        }
    } else {
        for name in &CheckName::ALL[1..] {
            let reason = match (&halt, config.wants(*name)) {
                (_, false) => "not requested".to_string(),
                (Some(h), true) => h.clone(),
                (None, true) => unreachable!("analysis runs whenever a downstream check is requested"),
            };
            reports.push(CheckReport::skipped(name.as_str(), &reason));
        }
    }
    if !config.wants(CheckName::Validate) {
        reports.insert(0, CheckReport::skipped("validate", "not requested"));
    }

    let passed = errors.is_empty() && reports.iter().all(|r| !r.has_failure());
    Ok(RunReport {
        tool: "finsler-lab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        grammar_version: GRAMMAR_VERSION,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: config.clone(),
        provenance: Provenance {
            count: samples.len(),
            seed: config.samples.seed,
            bounds,
            y_annulus: [Y_MIN, Y_MAX],
            chart_domain: s.domain().to_vec(),
            engine,
        },
        r2_convention: R2_CONVENTION.into(),
        lambda,
        checks: reports,
        errors,
        passed,
    })
}
