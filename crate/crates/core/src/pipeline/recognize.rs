//! Gated training and recognition.

use std::path::PathBuf;

use crate::detect::{detect_forgery, DetectorConfig, ForgeryVerdict};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::nn::{decode, forward, init_network, train, TrainOutcome};
use crate::pipeline::config::{Matcher, PipelineConfig};
use crate::pipeline::forge::par_map;
use crate::pipeline::gallery::GalleryImage;
use crate::pipeline::model::{nearest_gallery, GalleryFeature, RecognitionModel};
use crate::preprocess::{pca_fit, preprocess_with, FeatureExtractor, FeatureMode, FeatureVector};

/// Gallery images the detector flags as forged, with their verdicts.
pub fn forged_members(images: &[GalleryImage], detector: &DetectorConfig) -> Result<Vec<(PathBuf, ForgeryVerdict)>> {
    let verdicts = par_map(images, |g| detect_forgery(&g.image, detector));
    let mut forged = Vec::new();
    for (g, v) in images.iter().zip(verdicts) {
        let v = v?;
        if v.is_forged() {
            forged.push((g.path.clone(), v));
        }
    }
    Ok(forged)
}

/// Subject labels in order of first appearance and each image's label index.
pub fn index_labels(images: &[GalleryImage]) -> (Vec<String>, Vec<usize>) {
    let mut labels: Vec<String> = Vec::new();
    let idx = images
        .iter()
        .map(|g| match labels.iter().position(|l| *l == g.label) {
            Some(i) => i,
            None => {
                labels.push(g.label.clone());
                labels.len() - 1
            }
        })
        .collect();
    (labels, idx)
}

/// Feature extractor fitted to the training vectors. The PCA dimension is
/// capped at `samples − 1`, the rank available from the training set.
pub fn fit_extractor(vectors: &[FeatureVector], cfg: &PipelineConfig) -> Result<FeatureExtractor> {
    Ok(match cfg.feature_mode {
        FeatureMode::Raw400 => FeatureExtractor::Raw,
        FeatureMode::DctLowfreq => FeatureExtractor::Dct {
            side: cfg.target_side,
            k: cfg.dct_k,
        },
        FeatureMode::Pca => {
            if vectors.len() < 2 {
                return Err(Error::param("PCA features need at least two training images"));
            }
            FeatureExtractor::Pca(pca_fit(vectors, cfg.pca_k.min(vectors.len() - 1))?)
        }
    })
}

#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub model: RecognitionModel,
    pub outcome: TrainOutcome,
}

/// Preprocesses, fits features and trains the network. No gating is done here.
pub fn train_model(images: &[GalleryImage], cfg: &PipelineConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let (labels, targets) = index_labels(images);
    if labels.len() < 2 {
        return Err(Error::Gallery(format!(
            "training needs at least two subjects, found {}",
            labels.len()
        )));
    }
    let pre = cfg.preprocess();
    let vectors = par_map(images, |g| preprocess_with(&g.image, &pre))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let extractor = fit_extractor(&vectors, cfg)?;
    let features = vectors
        .iter()
        .map(|v| extractor.extract(v).map(|f| f.values))
        .collect::<Result<Vec<_>>>()?;
    let d = features[0].len();
    let network = init_network([d, cfg.hidden_units, labels.len()], cfg.train.seed)?;
    let data: Vec<(Vec<f64>, usize)> = features.iter().cloned().zip(targets.iter().cloned()).collect();
    let outcome = train(network, &data, &cfg.train)?;
    let model = RecognitionModel {
        network: outcome.network.clone(),
        feature_mode: cfg.feature_mode,
        extractor,
        preprocess: pre,
        labels,
        detector: cfg.detector.clone(),
        seed: cfg.train.seed,
        gallery: features
            .into_iter()
            .zip(targets)
            .map(|(features, label)| GalleryFeature { label, features })
            .collect(),
    };
    Ok(TrainedModel { model, outcome })
}

/// One model's answer for a probe.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub model_index: usize,
    pub label: String,
    pub confidence: f64,
    /// Euclidean distance to the nearest gallery entry, for the Euclidean matcher.
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Recognition {
    Forged(ForgeryVerdict),
    Match(Candidate),
    Rejected(Candidate),
}

/// Scores already-extracted features against one model.
///
/// The Euclidean matcher reports one minus the root-mean-square pixel
/// difference, `1 − d / side`, for nearest distance `d` (clamped to `[0, 1]`).
/// PCA and orthonormal DCT features approximately preserve pixel-space distance.
pub fn match_features(model: &RecognitionModel, f: &[f64], matcher: Matcher) -> Result<(usize, f64, Option<f64>)> {
    match matcher {
        Matcher::Network => {
            let p = decode(&forward(&model.network, f)?.output, 0.0);
            Ok((p.label, p.confidence, None))
        }
        Matcher::Euclidean => {
            let (label, d) = nearest_gallery(model, f)
                .ok_or_else(|| Error::param("model stores no gallery features for Euclidean matching"))?;
            let side = model.preprocess.target_side as f64;
            Ok((label, (1.0 - d / side).clamp(0.0, 1.0), Some(d)))
        }
    }
}

/// Checks that `model` was built with the feature settings in `cfg`.
pub fn check_compatible(model: &RecognitionModel, cfg: &PipelineConfig) -> Result<()> {
    if model.preprocess.target_side != cfg.target_side || model.feature_mode != cfg.feature_mode {
        return Err(Error::param(format!(
            "model uses {:?} features at side {} but config asks for {:?} at side {}",
            model.feature_mode, model.preprocess.target_side, cfg.feature_mode, cfg.target_side
        )));
    }
    Ok(())
}

/// Verifies `img` and, only if authentic, matches it against every model.
///
/// `features` is called once per model to produce the probe's feature vector.
/// The best candidate across models wins, the first model on ties.
pub fn recognize_with<F>(
    img: &GrayImage,
    models: &[RecognitionModel],
    cfg: &PipelineConfig,
    mut features: F,
) -> Result<Recognition>
where
    F: FnMut(&RecognitionModel, &GrayImage) -> Result<Vec<f64>>,
{
    if models.is_empty() {
        return Err(Error::param("no recognition models given"));
    }
    let verdict = detect_forgery(img, &cfg.detector)?;
    if verdict.is_forged() {
        return Ok(Recognition::Forged(verdict));
    }
    let mut best: Option<Candidate> = None;
    for (i, model) in models.iter().enumerate() {
        check_compatible(model, cfg)?;
        let f = features(model, img)?;
        let (label, confidence, distance) = match_features(model, &f, cfg.matcher)?;
        if best.as_ref().is_none_or(|b| confidence > b.confidence) {
            best = Some(Candidate {
                model_index: i,
                label: model.labels[label].clone(),
                confidence,
                distance,
            });
        }
    }
    let best = best.expect("at least one model");
    Ok(if best.confidence < cfg.reject_below {
        Recognition::Rejected(best)
    } else {
        Recognition::Match(best)
    })
}

pub fn recognize(img: &GrayImage, models: &[RecognitionModel], cfg: &PipelineConfig) -> Result<Recognition> {
    recognize_with(img, models, cfg, |m, i| m.features(i))
}

/// Rank-1 accuracy of `model` on labeled probes, without gating.
pub fn rank1_accuracy(model: &RecognitionModel, probes: &[GalleryImage], matcher: Matcher) -> Result<(usize, usize)> {
    let mut correct = 0;
    for p in probes {
        let f = model.features(&p.image)?;
        let (label, _, _) = match_features(model, &f, matcher)?;
        if model.labels[label] == p.label {
            correct += 1;
        }
    }
    Ok((correct, probes.len()))
}
