use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::DetectorConfig;
use crate::error::{Error, Result};
use crate::nn::TrainConfig;
use crate::preprocess::{FeatureMode, PreprocessConfig, DEFAULT_TARGET_SIDE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matcher {
    Network,
    Euclidean,
}

impl std::str::FromStr for Matcher {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "network" => Ok(Matcher::Network),
            "euclidean" => Ok(Matcher::Euclidean),
            other => Err(Error::param(format!("unknown matcher {other:?}"))),
        }
    }
}

/// Every tunable of the verify/recognize pipeline. Missing fields take defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub detector: DetectorConfig,
    pub feature_mode: FeatureMode,
    /// Requested PCA components; reduced to `samples − 1` on small galleries.
    pub pca_k: usize,
    pub dct_k: usize,
    pub target_side: usize,
    pub filter_size: usize,
    /// Optional percentile stretch `(lo, hi)` after equalization.
    pub stretch: Option<(f64, f64)>,
    pub hidden_units: usize,
    pub train: TrainConfig,
    pub reject_below: f64,
    pub matcher: Matcher,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            detector: DetectorConfig::default(),
            feature_mode: FeatureMode::Pca,
            pca_k: 40,
            dct_k: 40,
            target_side: DEFAULT_TARGET_SIDE,
            filter_size: 3,
            stretch: None,
            hidden_units: 90,
            train: TrainConfig::default(),
            reject_below: 0.5,
            matcher: Matcher::Network,
        }
    }
}

impl PipelineConfig {
    pub fn preprocess(&self) -> PreprocessConfig {
        PreprocessConfig {
            target_side: self.target_side,
            filter_size: self.filter_size,
            stretch: self.stretch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        self.train.validate()?;
        if self.target_side < 4 {
            return Err(Error::param(format!(
                "target_side must be at least 4, got {}",
                self.target_side
            )));
        }
        if self.filter_size < 3 || self.filter_size.is_multiple_of(2) {
            return Err(Error::param(format!(
                "filter_size must be odd and at least 3, got {}",
                self.filter_size
            )));
        }
        let d = self.target_side * self.target_side;
        match self.feature_mode {
            FeatureMode::Pca if self.pca_k == 0 || self.pca_k > d => {
                return Err(Error::param(format!("pca_k = {} outside 1..={d}", self.pca_k)));
            }
            FeatureMode::DctLowfreq if self.dct_k == 0 || self.dct_k > d => {
                return Err(Error::param(format!("dct_k = {} outside 1..={d}", self.dct_k)));
            }
            _ => {}
        }
        if self.hidden_units == 0 {
            return Err(Error::param("hidden_units must be positive"));
        }
        if !(0.0..=1.0).contains(&self.reject_below) {
            return Err(Error::param("reject_below must lie in [0, 1]"));
        }
        if let Some((lo, hi)) = self.stretch {
            if !(0.0 <= lo && lo < hi && hi <= 100.0) {
                return Err(Error::param(format!(
                    "stretch percentiles ({lo}, {hi}) are not ordered in [0, 100]"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Corrupt {
            what: "config",
            reason: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Loads `path` if given, otherwise the defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}
