//! Verify-then-recognize pipeline: configuration, galleries, model files,
//! calibration, synthetic corpora and benchmarks.

pub mod bench;
pub mod config;
pub mod corpus;
pub mod forge;
pub mod gallery;
pub mod model;
pub mod recognize;

use crate::detect::{ForgeryVerdict, Label};

pub use config::{Matcher, PipelineConfig};
pub use gallery::{Gallery, GalleryImage};
pub use model::RecognitionModel;
pub use recognize::{recognize, Recognition};

/// One-line verdict: `AUTHENTIC score=… threshold=…` or
/// `FORGED score=… threshold=… angle=… freq=…`.
pub fn verdict_line(v: &ForgeryVerdict) -> String {
    match v.label {
        Label::Authentic => format!("AUTHENTIC score={} threshold={}", v.score, v.threshold),
        Label::Forged => {
            let p = v.report.peak();
            format!(
                "FORGED score={} threshold={} angle={} freq={}",
                v.score, v.threshold, p.angle, p.dominant_frequency
            )
        }
    }
}
