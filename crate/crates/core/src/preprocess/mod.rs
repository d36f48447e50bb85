//! Image normalization and 1-D feature extraction for recognition.

mod dct;
mod filter;
mod pca;

use serde::{Deserialize, Serialize};

pub use dct::{dct2, dct_lowfreq, idct2, zigzag};
pub use filter::{average_filter, contrast_stretch, histogram, histogram_entropy, histogram_equalize, resize_bilinear};
pub use pca::{pca_fit, project_features, PcaModel};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::GrayImage;

/// Side of the square the normalized image is resized to (20² = 400 inputs).
pub const DEFAULT_TARGET_SIDE: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_label: Option<String>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        FeatureVector {
            values,
            source_label: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn distance(&self, other: &FeatureVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// The flattened `side×side` image.
    Raw400,
    /// Leading zig-zag DCT coefficients.
    DctLowfreq,
    /// PCA coordinates fitted on the gallery.
    Pca,
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw400" => Ok(Self::Raw400),
            "dct_lowfreq" => Ok(Self::DctLowfreq),
            "pca" => Ok(Self::Pca),
            _ => Err(Error::param(format!("unknown feature mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub target_side: usize,
    pub filter_size: usize,
    /// Optional `(lo_pct, hi_pct)` contrast stretch after equalization.
    #[serde(default)]
    pub stretch: Option<(f64, f64)>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            target_side: DEFAULT_TARGET_SIDE,
            filter_size: 3,
            stretch: None,
        }
    }
}

/// Filter → equalize → (stretch) → resize, returning the normalized image.
pub fn normalize_image(img: &GrayImage, cfg: &PreprocessConfig) -> Result<GrayImage> {
    if cfg.target_side < 4 {
        return Err(Error::param(format!(
            "target side must be at least 4, got {}",
            cfg.target_side
        )));
    }
    let filtered = average_filter(img, cfg.filter_size)?;
    let mut eq = histogram_equalize(&filtered);
    if let Some((lo, hi)) = cfg.stretch {
        eq = contrast_stretch(&eq, lo, hi)?;
    }
    resize_bilinear(&eq, cfg.target_side, cfg.target_side)
}

pub fn preprocess_with(img: &GrayImage, cfg: &PreprocessConfig) -> Result<FeatureVector> {
    Ok(FeatureVector::new(normalize_image(img, cfg)?.into_pixels()))
}

/// 3×3 average filter, histogram equalization, resize to `target_side²`, flatten.
pub fn preprocess_to_vector(img: &GrayImage, target_side: usize) -> Result<FeatureVector> {
    preprocess_with(
        img,
        &PreprocessConfig {
            target_side,
            ..PreprocessConfig::default()
        },
    )
}

/// Maps preprocessed vectors to network inputs.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureExtractor {
    Raw,
    Dct { side: usize, k: usize },
    Pca(PcaModel),
}

impl FeatureExtractor {
    pub fn output_len(&self, input_len: usize) -> usize {
        match self {
            Self::Raw => input_len,
            Self::Dct { k, .. } => *k,
            Self::Pca(m) => m.k(),
        }
    }

    pub fn extract(&self, v: &FeatureVector) -> Result<FeatureVector> {
        match self {
            Self::Raw => Ok(v.clone()),
            Self::Dct { side, k } => {
                if v.len() != side * side {
                    return Err(Error::param(format!(
                        "expected {}-element vector for DCT features, got {}",
                        side * side,
                        v.len()
                    )));
                }
                if *k == 0 || *k > v.len() {
                    return Err(Error::param(format!("dct_k = {k} outside 1..={}", v.len())));
                }
                let f = Field {
                    width: *side,
                    height: *side,
                    values: v.values.clone(),
                };
                Ok(FeatureVector {
                    values: dct_lowfreq(&f, *k),
                    source_label: v.source_label.clone(),
                })
            }
            Self::Pca(m) => project_features(m, v),
        }
    }
}
