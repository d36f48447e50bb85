//! Building forgeries from geometric flags, and threshold calibration.

use crate::detect::{detect_forgery, DetectorConfig};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::synth::{apply_affine, AffineParams, InterpolationKernel};

pub const CALIBRATION_SCALES: [f64; 5] = [1.1, 1.2, 1.3, 1.4, 1.5];
pub const CALIBRATION_KERNELS: [InterpolationKernel; 2] = [InterpolationKernel::Linear, InterpolationKernel::Cubic];
pub const MIN_CALIBRATION_ORIGINALS: usize = 10;

/// Rescale, shear and rotation about the image centre, applied in that order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub scale: f64,
    pub rotate_deg: f64,
    /// Horizontal shear factor.
    pub skew: f64,
    pub kernel: InterpolationKernel,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            scale: 1.0,
            rotate_deg: 0.0,
            skew: 0.0,
            kernel: InterpolationKernel::Cubic,
        }
    }
}

/// `(cos, sin)` that are exact at multiples of 90 degrees.
fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let quarter = deg / 90.0;
    if quarter == quarter.round() {
        match (quarter as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        let r = deg.to_radians();
        (r.cos(), r.sin())
    }
}

impl SynthSpec {
    /// Forward map for an image of the given size, `R · Shear · S` about `((w−1)/2, (h−1)/2)`.
    ///
    /// Rotation is counter-clockwise on screen (image rows grow downward).
    pub fn params(&self, width: usize, height: usize) -> Result<AffineParams> {
        if !(self.scale.is_finite() && self.rotate_deg.is_finite() && self.skew.is_finite()) {
            return Err(Error::param("synthesis parameters must be finite"));
        }
        let (c, s) = cos_sin_deg(self.rotate_deg);
        let rot = [[c, s], [-s, c]];
        let shear = [[1.0, self.skew], [0.0, 1.0]];
        let scale = [[self.scale, 0.0], [0.0, self.scale]];
        let m = matmul(rot, matmul(shear, scale));
        let p = AffineParams::about_center(m, (width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
        p.inverse()?;
        Ok(p)
    }

    pub fn apply(&self, img: &GrayImage) -> Result<(GrayImage, AffineParams)> {
        let p = self.params(img.width(), img.height())?;
        Ok((apply_affine(img, &p, self.kernel)?, p))
    }
}

fn matmul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `img` rescaled by `scale` about its centre.
pub fn scale_forgery(img: &GrayImage, scale: f64, kernel: InterpolationKernel) -> Result<GrayImage> {
    Ok(SynthSpec {
        scale,
        kernel,
        ..SynthSpec::default()
    }
    .apply(img)?
    .0)
}

/// Runs `f` over `items` on all available cores, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrengthSample {
    pub source: String,
    /// `None` for an original, otherwise the forgery's scale and kernel.
    pub forgery: Option<(f64, InterpolationKernel)>,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub threshold: f64,
    pub balanced_accuracy: f64,
    pub samples: Vec<StrengthSample>,
}

/// Mean of the true-positive rate (forgeries above `tau`) and the true-negative rate.
pub fn balanced_accuracy(originals: &[f64], forgeries: &[f64], tau: f64) -> f64 {
    let tnr = originals.iter().filter(|&&s| s <= tau).count() as f64 / originals.len() as f64;
    let tpr = forgeries.iter().filter(|&&s| s > tau).count() as f64 / forgeries.len() as f64;
    0.5 * (tpr + tnr)
}

/// Midpoint of the gap between adjacent observed strengths that maximizes
/// balanced accuracy, taking the lowest on ties.
pub fn choose_threshold(originals: &[f64], forgeries: &[f64]) -> Result<(f64, f64)> {
    if originals.is_empty() || forgeries.is_empty() {
        return Err(Error::param("calibration needs both originals and forgeries"));
    }
    let mut all: Vec<f64> = originals.iter().chain(forgeries).cloned().collect();
    if all.iter().any(|s| !s.is_finite()) {
        return Err(Error::param("non-finite strength in calibration set"));
    }
    all.sort_by(f64::total_cmp);
    all.dedup();
    let candidates: Vec<f64> = if all.len() == 1 {
        vec![all[0]]
    } else {
        all.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    };
    let mut best = (candidates[0], balanced_accuracy(originals, forgeries, candidates[0]));
    for &tau in &candidates[1..] {
        let ba = balanced_accuracy(originals, forgeries, tau);
        if ba > best.1 {
            best = (tau, ba);
        }
    }
    Ok(best)
}

/// Scores each original and its forgery grid, then picks the threshold.
pub fn calibrate(originals: &[(String, GrayImage)], detector: &DetectorConfig) -> Result<Calibration> {
    if originals.len() < MIN_CALIBRATION_ORIGINALS {
        return Err(Error::param(format!(
            "calibration needs at least {MIN_CALIBRATION_ORIGINALS} originals, got {}",
            originals.len()
        )));
    }
    let mut jobs: Vec<(usize, Option<(f64, InterpolationKernel)>)> = Vec::new();
    for i in 0..originals.len() {
        jobs.push((i, None));
        for &s in &CALIBRATION_SCALES {
            for &k in &CALIBRATION_KERNELS {
                jobs.push((i, Some((s, k))));
            }
        }
    }
    let scored = par_map(&jobs, |&(i, forgery)| -> Result<StrengthSample> {
        let (source, img) = &originals[i];
        let strength = match forgery {
            None => detect_forgery(img, detector)?.score,
            Some((s, k)) => detect_forgery(&scale_forgery(img, s, k)?, detector)?.score,
        };
        Ok(StrengthSample {
            source: source.clone(),
            forgery,
            strength,
        })
    });
    let samples = scored.into_iter().collect::<Result<Vec<_>>>()?;
    let (orig, forged): (Vec<&StrengthSample>, Vec<&StrengthSample>) =
        samples.iter().partition(|s| s.forgery.is_none());
    let strengths = |v: Vec<&StrengthSample>| v.iter().map(|s| s.strength).collect::<Vec<_>>();
    let (threshold, balanced_accuracy) = choose_threshold(&strengths(orig), &strengths(forged))?;
    Ok(Calibration {
        threshold,
        balanced_accuracy,
        samples,
    })
}

/// CSV with header `source,kind,scale,kernel,strength`.
pub fn write_strength_csv<W: std::io::Write>(mut out: W, samples: &[StrengthSample]) -> std::io::Result<()> {
    writeln!(out, "source,kind,scale,kernel,strength")?;
    for s in samples {
        match s.forgery {
            None => writeln!(out, "{},original,1,none,{}", s.source, s.strength)?,
            Some((scale, k)) => writeln!(out, "{},forgery,{},{},{}", s.source, scale, k, s.strength)?,
        }
    }
    Ok(())
}
