//! Resampling-trace detector.
//!
//! The image is differentiated along rows, the magnitude is projected at
//! 0..179 degrees, and each projection's autocovariance is searched for a
//! dominant periodic component. Interpolation leaves a periodic variance in
//! the derivative, which shows up as a strong non-DC spectral peak.

mod autocov;
mod derivative;
mod periodicity;
mod radon;

use serde::{Deserialize, Serialize};

pub use autocov::{autocovariance, AutoCovSequence};
pub use derivative::{derivative_n, difference_taps, image_derivative_magnitude, theoretical_derivative_variance};
pub use periodicity::{mirrored_spectrum, periodicity_score};
pub use radon::{project, radon_180, radon_transform, Projection, Sinogram, NUM_ANGLES};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::GrayImage;

/// Threshold produced by `imgauth calibrate` on the reference noise corpus
/// (20 uniform-noise 128×128 originals, seeds 1000..1019). Regenerate with
/// the steps in the README if the detector changes.
pub const CALIBRATED_THRESHOLD: f64 = 40.74971344959189;

/// Smallest side accepted by [`detect_forgery`].
pub const MIN_SIDE: usize = 32;

/// Bins whose sub-pixel coverage falls below this fraction of the peak
/// coverage are trimmed from both ends of a projection.
pub const MIN_COVERAGE_FRACTION: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Order of the row derivative.
    #[serde(rename = "n")]
    pub derivative_order: usize,
    #[serde(rename = "tau")]
    pub threshold: f64,
    pub max_lag: usize,
    #[serde(rename = "dc_exclusion")]
    pub dc_exclusion_bins: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            derivative_order: 2,
            threshold: CALIBRATED_THRESHOLD,
            max_lag: 128,
            dc_exclusion_bins: 2,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.derivative_order < 1 {
            return Err(Error::param("derivative order must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::param(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        if self.max_lag < 8 {
            return Err(Error::param("max_lag must be at least 8"));
        }
        if self.dc_exclusion_bins < 1 {
            return Err(Error::param("dc_exclusion must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleScore {
    pub angle: u32,
    /// Cycles per sample; 0 when the projection carries no variation.
    pub dominant_frequency: f64,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub angles: Vec<AngleScore>,
    pub global_max_strength: f64,
    pub global_peak_angle: u32,
}

impl PeriodicityReport {
    pub fn peak(&self) -> &AngleScore {
        &self.angles[self.global_peak_angle as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Authentic,
    Forged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForgeryVerdict {
    pub label: Label,
    pub score: f64,
    pub threshold: f64,
    pub report: PeriodicityReport,
}

impl ForgeryVerdict {
    pub fn is_forged(&self) -> bool {
        self.label == Label::Forged
    }
}

/// Spectrum of one angle's autocovariance; bin `j` has frequency `j / (2·max_lag)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSpectrum {
    pub angle: u32,
    pub magnitudes: Vec<f64>,
}

impl AngleSpectrum {
    pub fn frequency(&self, bin: usize) -> f64 {
        let m = 2 * (self.magnitudes.len() - 1);
        if m == 0 {
            0.0
        } else {
            bin as f64 / m as f64
        }
    }
}

/// Divides each bin by its sub-pixel coverage and trims the sparsely covered tails.
///
/// Raw projections carry the image footprint (a trapezoid at oblique angles)
/// and a lattice pattern from the sub-pixel binning; both dominate the low
/// end of the spectrum unless removed.
fn coverage_normalize(p: &Projection, coverage: &Projection) -> Vec<f64> {
    let peak = coverage.values.iter().cloned().fold(0.0, f64::max);
    let keep = |c: &f64| *c >= MIN_COVERAGE_FRACTION * peak;
    let first = coverage.values.iter().position(keep).unwrap_or(0);
    let last = coverage.values.iter().rposition(keep).unwrap_or(0);
    (first..=last)
        .map(|i| {
            let c = coverage.values[i];
            if c > 0.0 {
                p.values[i] / c
            } else {
                0.0
            }
        })
        .collect()
}

struct Sweep {
    scores: Vec<AngleScore>,
    spectra: Vec<AngleSpectrum>,
}

fn sweep(img: &GrayImage, cfg: &DetectorConfig) -> Result<Sweep> {
    cfg.validate()?;
    if img.width() < MIN_SIDE || img.height() < MIN_SIDE {
        return Err(Error::param(format!(
            "image {}x{} below the {MIN_SIDE}x{MIN_SIDE} minimum for detection",
            img.width(),
            img.height()
        )));
    }
    let field = image_derivative_magnitude(img, cfg.derivative_order)?;
    let support = Field {
        width: field.width,
        height: field.height,
        values: vec![1.0; field.values.len()],
    };
    let mut scores = Vec::with_capacity(NUM_ANGLES);
    let mut spectra = Vec::with_capacity(NUM_ANGLES);
    for angle in 0..NUM_ANGLES as u32 {
        let p = project(&field, angle);
        let cov = project(&support, angle);
        let v = coverage_normalize(&p, &cov);
        let lag = cfg.max_lag.min(v.len() / 2);
        let acov = autocovariance(&v, lag)?;
        let magnitudes = mirrored_spectrum(&acov);
        let all_zero = acov.values.iter().all(|&x| x == 0.0);
        let (dominant_frequency, strength) = periodicity::score_spectrum(&magnitudes, all_zero, cfg.dc_exclusion_bins);
        scores.push(AngleScore {
            angle,
            dominant_frequency,
            strength,
        });
        spectra.push(AngleSpectrum { angle, magnitudes });
    }
    Ok(Sweep { scores, spectra })
}

fn verdict(scores: Vec<AngleScore>, threshold: f64) -> ForgeryVerdict {
    // Strict comparison keeps the lowest angle on ties.
    let mut peak = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.strength > scores[peak].strength {
            peak = i;
        }
    }
    let score = scores[peak].strength;
    let report = PeriodicityReport {
        global_max_strength: score,
        global_peak_angle: scores[peak].angle,
        angles: scores,
    };
    ForgeryVerdict {
        label: if score > threshold {
            Label::Forged
        } else {
            Label::Authentic
        },
        score,
        threshold,
        report,
    }
}

/// Classifies `img` as authentic or forged.
pub fn detect_forgery(img: &GrayImage, cfg: &DetectorConfig) -> Result<ForgeryVerdict> {
    Ok(verdict(sweep(img, cfg)?.scores, cfg.threshold))
}

/// Like [`detect_forgery`] but also returns every angle's spectrum.
pub fn detect_forgery_with_spectra(
    img: &GrayImage,
    cfg: &DetectorConfig,
) -> Result<(ForgeryVerdict, Vec<AngleSpectrum>)> {
    let Sweep { scores, spectra } = sweep(img, cfg)?;
    Ok((verdict(scores, cfg.threshold), spectra))
}

/// Writes spectra as CSV with header `angle,frequency,magnitude`.
pub fn write_spectrum_csv<W: std::io::Write>(mut out: W, spectra: &[AngleSpectrum]) -> std::io::Result<()> {
    writeln!(out, "angle,frequency,magnitude")?;
    for s in spectra {
        for (j, m) in s.magnitudes.iter().enumerate() {
            writeln!(out, "{},{},{}", s.angle, s.frequency(j), m)?;
        }
    }
    Ok(())
}
