//! Run configuration: a flat TOML file whose values command-line flags override.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::docops::KeptDefinition;
use crate::edits::DEFAULT_MAX_LEVEL;
use crate::error::{Error, Result};
use crate::paragraph::Thresholds;
use crate::pipeline::{AlignConfig, Direction};
use crate::similarity::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractMethod {
    DiffBaseline,
    #[default]
    Simple,
    Parse,
}

impl std::str::FromStr for ExtractMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diff-baseline" | "diff" => Ok(ExtractMethod::DiffBaseline),
            "simple" => Ok(ExtractMethod::Simple),
            "parse" => Ok(ExtractMethod::Parse),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

/// Every field is optional in the file; missing ones take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau4: f64,
    pub metric: Metric,
    /// Sentence threshold; `None` means the metric's default.
    pub threshold: Option<f64>,
    pub direction: Direction,
    pub method: ExtractMethod,
    pub max_level: usize,
    pub kept_definition: KeptDefinition,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub corpus: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        RunConfig {
            tau1: t.tau1,
            tau2: t.tau2,
            tau3: t.tau3,
            tau4: t.tau4,
            metric: Metric::Jaccard,
            threshold: None,
            direction: Direction::Both,
            method: ExtractMethod::Simple,
            max_level: DEFAULT_MAX_LEVEL,
            kept_definition: KeptDefinition::CopyOnly,
            jobs: 0,
            corpus: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text)
            .map_err(|e| Error::Schema { path: "config".into(), message: e.message().to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds { tau1: self.tau1, tau2: self.tau2, tau3: self.tau3, tau4: self.tau4 }
    }

    pub fn sentence_threshold(&self) -> f64 {
        self.threshold.unwrap_or_else(|| self.metric.default_threshold())
    }

    pub fn align_config(&self) -> AlignConfig {
        AlignConfig {
            thresholds: self.thresholds(),
            metric: self.metric,
            threshold: self.sentence_threshold(),
            direction: self.direction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds().validate()?;
        let t = self.sentence_threshold();
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("threshold = {t} is outside [0, 1]")));
        }
        Ok(())
    }
}
