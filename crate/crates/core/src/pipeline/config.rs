use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::polarization::{PiOptions, SolverOptions};
use crate::structure::LeanOrientation;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    #[default]
    Direct,
    FixedPoint,
}

/// Run configuration, read from TOML. Relative paths are resolved against
/// the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub tweets: PathBuf,
    pub annotations: PathBuf,
    pub follows: PathBuf,
    /// Filter rules; the shipped defaults when absent.
    #[serde(default)]
    pub rules: Option<PathBuf>,
    /// One stopword per line, applied to word and phrase counts.
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub schema_strict: bool,
    /// First and last day of the analysis; default to the rule study window.
    #[serde(default)]
    pub from: Option<NaiveDate>,
    #[serde(default)]
    pub to: Option<NaiveDate>,
    /// Replaces the rule set's offset when given.
    #[serde(default)]
    pub utc_offset_minutes: Option<i32>,
    #[serde(default)]
    pub threshold: f64,
    #[serde(default = "default_sweep")]
    pub sweep_thresholds: Vec<f64>,
    /// Influencers per graph, capped at the node count.
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_k")]
    pub prevalent_top_k: usize,
    #[serde(default = "default_stats_top_k")]
    pub stats_top_k: usize,
    #[serde(default = "default_top_n")]
    pub top_n_communities: usize,
    #[serde(default = "default_true")]
    pub drop_isolated: bool,
    /// Emit ablations and PI series with and without isolated nodes.
    #[serde(default)]
    pub both_isolated_modes: bool,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub lean: LeanOrientation,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_sweep() -> Vec<f64> {
    vec![0.0, 0.5, 0.7]
}

fn default_k() -> usize {
    500
}

fn default_stats_top_k() -> usize {
    10
}

fn default_top_n() -> usize {
    10
}

fn default_true() -> bool {
    true
}

impl PipelineConfig {
    pub fn new(
        tweets: impl Into<PathBuf>,
        annotations: impl Into<PathBuf>,
        follows: impl Into<PathBuf>,
    ) -> Self {
        PipelineConfig {
            tweets: tweets.into(),
            annotations: annotations.into(),
            follows: follows.into(),
            rules: None,
            stopwords: None,
            out_dir: default_out(),
            schema_strict: false,
            from: None,
            to: None,
            utc_offset_minutes: None,
            threshold: 0.0,
            sweep_thresholds: default_sweep(),
            k: default_k(),
            prevalent_top_k: default_k(),
            stats_top_k: default_stats_top_k(),
            top_n_communities: default_top_n(),
            drop_isolated: true,
            both_isolated_modes: false,
            solver: SolverChoice::Direct,
            lean: LeanOrientation::LeftPositive,
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_toml_str(s: &str, base_dir: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig =
            toml::from_str(s).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, base)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |t: f64| !(0.0..=1.0).contains(&t);
        if bad(self.threshold) || self.sweep_thresholds.iter().any(|&t| bad(t)) {
            return Err(PipelineError::Config(
                "thresholds must lie in [0, 1]".into(),
            ));
        }
        if let (Some(a), Some(b)) = (self.from, self.to) {
            if a > b {
                return Err(PipelineError::Config(format!("from {a} is after to {b}")));
            }
        }
        if self.prevalent_top_k == 0 || self.stats_top_k == 0 {
            return Err(PipelineError::Config("top-k sizes must be positive".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn out_path(&self) -> PathBuf {
        self.resolve(&self.out_dir)
    }

    pub fn pi_options(&self, include_isolated: bool) -> PiOptions {
        let solver = match self.solver {
            SolverChoice::Direct => SolverOptions::default(),
            SolverChoice::FixedPoint => SolverOptions::fixed_point(),
        };
        PiOptions {
            solver,
            include_isolated,
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
