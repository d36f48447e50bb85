//! Deterministic synthetic images for calibration and recognition fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::GrayImage;
use crate::preprocess::{idct2, zigzag};

/// Low-frequency DCT coefficients (after DC, in zigzag order) that shape a subject.
pub const FACE_COEFFICIENTS: usize = 14;
/// Margin of the canvas each shot is cropped from.
pub const FACE_JITTER: usize = 6;
/// Half-width of the uniform per-pixel noise added to every shot.
pub const FACE_NOISE: f64 = 0.1;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform white noise in `[0, 1)`.
pub fn noise_image(side: usize, seed: u64) -> Result<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(side, side, |_, _| rng.random::<f64>())
}

fn subject_pattern(subject: u64, canvas: usize, seed: u64) -> Field {
    let mut rng = rng_for(seed, 2 * subject + 1);
    let mut coeffs = Field::zeros(canvas, canvas);
    for &(u, v) in zigzag(canvas, canvas).iter().skip(1).take(FACE_COEFFICIENTS) {
        coeffs.set(u, v, rng.random_range(-1.0..1.0));
    }
    let mut pattern = idct2(&coeffs);
    let lo = pattern.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pattern.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    for p in &mut pattern.values {
        *p = 0.2 + 0.6 * (*p - lo) / span;
    }
    pattern
}

/// One shot of a synthetic subject: a smooth pattern unique to `subject`,
/// cropped at a shot-dependent offset, with per-shot brightness drift and noise.
pub fn desk_face(subject: u64, shot: u64, side: usize, seed: u64) -> Result<GrayImage> {
    if side == 0 {
        return Err(Error::param("side must be positive"));
    }
    let canvas = side + FACE_JITTER;
    let pattern = subject_pattern(subject, canvas, seed);
    let mut rng = rng_for(seed, 2 * (subject * 1024 + shot) + 2);
    let dx = rng.random_range(0..=FACE_JITTER);
    let dy = rng.random_range(0..=FACE_JITTER);
    let gain = rng.random_range(0.9..1.1);
    GrayImage::from_fn(side, side, |x, y| {
        let base = pattern.get(x + dx, y + dy);
        (0.5 + gain * (base - 0.5) + rng.random_range(-FACE_NOISE..FACE_NOISE)).clamp(0.0, 1.0)
    })
}

/// Labeled images, as written to a gallery.
pub type LabeledImages = Vec<(String, GrayImage)>;

/// Labels `s01`, `s02`, … for `subjects` subjects and their train/test shots.
pub fn desk_gallery(
    subjects: usize,
    train_shots: usize,
    test_shots: usize,
    side: usize,
    seed: u64,
) -> Result<(LabeledImages, LabeledImages)> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for s in 0..subjects {
        let label = format!("s{:02}", s + 1);
        for shot in 0..train_shots + test_shots {
            let img = desk_face(s as u64, shot as u64, side, seed)?;
            let dst = if shot < train_shots { &mut train } else { &mut test };
            dst.push((label.clone(), img));
        }
    }
    Ok((train, test))
}
