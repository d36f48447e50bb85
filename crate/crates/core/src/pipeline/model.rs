//! Trained recognizers and their JSON model file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::DetectorConfig;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::nn::{Layer, Network};
use crate::preprocess::{preprocess_with, FeatureExtractor, FeatureMode, PcaModel, PreprocessConfig};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Stored features of one training image, used by the Euclidean matcher.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalleryFeature {
    pub label: usize,
    pub features: Vec<f64>,
}

/// Everything needed to turn a probe image into a label.
#[derive(Clone, Debug, PartialEq)]
pub struct RecognitionModel {
    pub network: Network,
    pub feature_mode: FeatureMode,
    pub extractor: FeatureExtractor,
    pub preprocess: PreprocessConfig,
    pub labels: Vec<String>,
    pub detector: DetectorConfig,
    pub seed: u64,
    pub gallery: Vec<GalleryFeature>,
}

impl RecognitionModel {
    /// Preprocesses `img` and maps it to network inputs.
    pub fn features(&self, img: &GrayImage) -> Result<Vec<f64>> {
        let v = preprocess_with(img, &self.preprocess)?;
        let f = self.extractor.extract(&v)?.values;
        if f.len() != self.network.hidden.inputs {
            return Err(Error::param(format!(
                "feature length {} does not match network input size {}",
                f.len(),
                self.network.hidden.inputs
            )));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        let layer = |l: &Layer| l.weights.chunks(l.inputs).map(<[f64]>::to_vec).collect::<Vec<_>>();
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            layer_sizes: self.network.layer_sizes(),
            activation: "sigmoid".into(),
            weights: vec![layer(&self.network.hidden), layer(&self.network.output)],
            biases: vec![self.network.hidden.biases.clone(), self.network.output.biases.clone()],
            pca: match &self.extractor {
                FeatureExtractor::Pca(m) => Some(m.clone()),
                _ => None,
            },
            feature_mode: self.feature_mode,
            dct_k: match self.extractor {
                FeatureExtractor::Dct { k, .. } => Some(k),
                _ => None,
            },
            target_side: self.preprocess.target_side,
            filter_size: self.preprocess.filter_size,
            stretch: self.preprocess.stretch,
            labels: self.labels.clone(),
            detector: self.detector.clone(),
            seed: self.seed,
            gallery: self.gallery.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    /// Parses a model file. Nothing is returned unless the whole document is valid.
    pub fn from_json(text: &str) -> Result<Self> {
        let corrupt = |reason: String| Error::Corrupt {
            what: "model file",
            reason,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| corrupt("missing format_version".into()))?;
        if version != u64::from(MODEL_FORMAT_VERSION) {
            return Err(Error::ModelVersion {
                found: u32::try_from(version).unwrap_or(u32::MAX),
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
        file.into_model().map_err(|e| corrupt(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    layer_sizes: [usize; 3],
    activation: String,
    /// Per layer, one row of input weights per output neuron.
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    pca: Option<PcaModel>,
    feature_mode: FeatureMode,
    dct_k: Option<usize>,
    target_side: usize,
    filter_size: usize,
    stretch: Option<(f64, f64)>,
    labels: Vec<String>,
    detector: DetectorConfig,
    seed: u64,
    gallery: Vec<GalleryFeature>,
}

impl ModelFile {
    fn into_model(self) -> Result<RecognitionModel> {
        if self.activation != "sigmoid" {
            return Err(Error::param(format!("unsupported activation {:?}", self.activation)));
        }
        let [d, h, c] = self.layer_sizes;
        if self.weights.len() != 2 || self.biases.len() != 2 {
            return Err(Error::param("expected exactly two weight layers"));
        }
        let mut weights = self.weights.into_iter();
        let mut biases = self.biases.into_iter();
        let mut layer = |inputs: usize, outputs: usize| -> Result<Layer> {
            let rows = weights.next().unwrap_or_default();
            if rows.len() != outputs || rows.iter().any(|r| r.len() != inputs) {
                return Err(Error::param("weight matrix shape disagrees with layer_sizes"));
            }
            Ok(Layer {
                inputs,
                outputs,
                weights: rows.concat(),
                biases: biases.next().unwrap_or_default(),
            })
        };
        let hidden = layer(d, h)?;
        let output = layer(h, c)?;
        let network = Network::from_parts(hidden, output)?;
        if self.labels.len() != c {
            return Err(Error::param(format!("{} labels for {c} outputs", self.labels.len())));
        }
        let side = self.target_side;
        let extractor = match (self.feature_mode, self.pca, self.dct_k) {
            (FeatureMode::Raw400, None, None) => FeatureExtractor::Raw,
            (FeatureMode::DctLowfreq, None, Some(k)) => FeatureExtractor::Dct { side, k },
            (FeatureMode::Pca, Some(m), None) => {
                if m.dim() != side * side || m.mean.len() != m.dim() || m.eigenvalues.len() != m.k() {
                    return Err(Error::param("PCA block has inconsistent dimensions"));
                }
                FeatureExtractor::Pca(m)
            }
            _ => return Err(Error::param("feature_mode disagrees with the stored pca/dct_k fields")),
        };
        if extractor.output_len(side * side) != d {
            return Err(Error::param("feature length disagrees with network input size"));
        }
        if self.gallery.iter().any(|g| g.label >= c || g.features.len() != d) {
            return Err(Error::param("gallery feature entries are inconsistent"));
        }
        self.detector.validate()?;
        Ok(RecognitionModel {
            network,
            feature_mode: self.feature_mode,
            extractor,
            preprocess: PreprocessConfig {
                target_side: side,
                filter_size: self.filter_size,
                stretch: self.stretch,
            },
            labels: self.labels,
            detector: self.detector,
            seed: self.seed,
            gallery: self.gallery,
        })
    }
}

/// Distance from `f` to its nearest stored gallery feature, with that entry's label.
pub fn nearest_gallery(model: &RecognitionModel, f: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for g in &model.gallery {
        let d = f
            .iter()
            .zip(&g.features)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((g.label, d));
        }
    }
    best
}
