//! Run configuration, read from TOML. Unknown keys are errors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ad::EngineConfig;
use crate::error::{Error, Result};
use crate::metrics::{Family, FinslerStructure};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Validate,
    Classify,
    Curvature,
    ConstantFlag,
    Symmetry,
    TheoremAudit,
}

impl CheckName {
    /// Execution order.
    pub const ALL: [CheckName; 6] = [
        CheckName::Validate,
        CheckName::Classify,
        CheckName::Curvature,
        CheckName::ConstantFlag,
        CheckName::Symmetry,
        CheckName::TheoremAudit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Validate => "validate",
            CheckName::Classify => "classify",
            CheckName::Curvature => "curvature",
            CheckName::ConstantFlag => "constant_flag",
            CheckName::Symmetry => "symmetry",
            CheckName::TheoremAudit => "theorem_audit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    #[default]
    Text,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub count: usize,
    pub seed: u64,
    /// `[lo, hi]` per chart coordinate; defaults to `[-0.5, 0.5]` each.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
    /// Number of random flags for the flag-curvature coherence check.
    #[serde(default = "default_flags")]
    pub flags: usize,
}

fn default_flags() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    #[serde(default = "default_x_order")]
    pub x_order: usize,
    #[serde(default = "default_y_order")]
    pub y_order: usize,
}

fn default_x_order() -> usize {
    EngineConfig::default().x_order
}

fn default_y_order() -> usize {
    EngineConfig::default().y_order
}

impl Default for EngineSection {
    fn default() -> Self {
        let e = EngineConfig::default();
        EngineSection { x_order: e.x_order, y_order: e.y_order }
    }
}

impl From<EngineSection> for EngineConfig {
    fn from(e: EngineSection) -> Self {
        EngineConfig { x_order: e.x_order, y_order: e.y_order }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub metric: Family,
    pub samples: SampleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub output: OutputConfig,
}

fn all_checks() -> Vec<CheckName> {
    CheckName::ALL.to_vec()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Config(format!("dimension must be at least 2, got {}", self.dimension)));
        }
        if self.samples.count == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if let Some(b) = &self.samples.bounds {
            if b.len() != self.dimension {
                return Err(Error::Config(format!(
                    "samples.box has {} intervals for dimension {}",
                    b.len(),
                    self.dimension
                )));
            }
            if b.iter().any(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
                return Err(Error::Config("samples.box intervals must be finite with lo < hi".into()));
            }
        }
        if self.checks.is_empty() {
            return Err(Error::Config("at least one check must be requested".into()));
        }
        self.tolerances.validate()?;
        EngineConfig::from(self.engine).validate()?;
        Ok(())
    }

    pub fn wants(&self, c: CheckName) -> bool {
        self.checks.contains(&c)
    }

    pub fn bounds(&self) -> Vec<[f64; 2]> {
        self.samples
            .bounds
            .clone()
            .unwrap_or_else(|| vec![[-0.5, 0.5]; self.dimension])
    }

    pub fn structure(&self) -> Result<FinslerStructure> {
        FinslerStructure::new(self.dimension, self.metric.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"
dimension = 2
[metric]
family = "riemannian"
metric = { kind = "sphere", radius = 1.0 }
[samples]
count = 10
seed = 42
"#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::from_toml(SPHERE).unwrap();
        assert_eq!(c.checks, CheckName::ALL.to_vec());
        assert_eq!(c.samples.flags, 100);
        assert_eq!(c.bounds(), vec![[-0.5, 0.5]; 2]);
        assert_eq!(c.output.format, Format::Text);
        c.structure().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml(&format!("{SPHERE}\ncolour = 1")).is_err());
        assert!(RunConfig::from_toml(&SPHERE.replace("seed = 42", "seed = 42\nsed = 1")).is_err());
        assert!(RunConfig::from_toml(&SPHERE.replace("radius = 1.0", "radius = 1.0, extra = 2")).is_err());
        assert!(RunConfig::from_toml(&SPHERE.replace("count = 10", "count = 0")).is_err());
        assert!(RunConfig::from_toml(&format!("{SPHERE}\n[tolerances]\neq1 = -1.0")).is_err());
        assert!(RunConfig::from_toml(&format!("{SPHERE}\n[tolerances]\nequation1 = 1.0")).is_err());
        assert!(RunConfig::from_toml(&SPHERE.replace("dimension = 2", "dimension = 1")).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::from_toml(SPHERE).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }
}
