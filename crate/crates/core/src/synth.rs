//! Forgery synthesis: interpolation kernels, 1-D resampling, and affine warps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{reflect, GrayImage};

/// Keys cubic convolution parameter.
pub const KEYS_A: f64 = -0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationKernel {
    Nearest,
    Linear,
    Cubic,
}

impl InterpolationKernel {
    pub const ALL: [InterpolationKernel; 3] = [Self::Nearest, Self::Linear, Self::Cubic];

    /// Kernel weight `w(t)`.
    ///
    /// Nearest uses the half-open support `[-0.5, 0.5)`; cubic is the Keys
    /// kernel with `a = -0.5`.
    pub fn weight(self, t: f64) -> f64 {
        match self {
            Self::Nearest => {
                if (-0.5..0.5).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Linear => (1.0 - t.abs()).max(0.0),
            Self::Cubic => {
                let a = KEYS_A;
                let t = t.abs();
                if t < 1.0 {
                    ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
                } else if t < 2.0 {
                    ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width of the support, in samples.
    pub fn radius(self) -> f64 {
        match self {
            Self::Nearest => 0.5,
            Self::Linear => 1.0,
            Self::Cubic => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Nearest => "nearest",
            Self::Linear => "linear",
            Self::Cubic => "cubic",
        }
    }
}

impl std::str::FromStr for InterpolationKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nearest" => Ok(Self::Nearest),
            "linear" | "bilinear" => Ok(Self::Linear),
            "cubic" | "bicubic" => Ok(Self::Cubic),
            _ => Err(Error::param(format!("unknown kernel '{s}'"))),
        }
    }
}

impl std::fmt::Display for InterpolationKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn kernel_weight(kernel: InterpolationKernel, t: f64) -> f64 {
    kernel.weight(t)
}

/// Uniformly sampled 1-D signal `f_k` with sampling step `step`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    step: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, step: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("signal must be non-empty"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param(format!("sampling step must be positive, got {step}")));
        }
        Ok(Signal { samples, step })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// Visits `(k, w(u - k))` for every lattice index `k` near `u`, in increasing `k`.
#[inline]
fn for_each_tap(kernel: InterpolationKernel, u: f64, mut f: impl FnMut(isize, f64)) {
    let base = u.floor() as isize;
    for k in base - 2..=base + 2 {
        let w = kernel.weight(u - k as f64);
        if w != 0.0 {
            f(k, w);
        }
    }
}

/// Evaluates `f^w(x) = Σ_k f_k w(x/Δx − k)` at every position, with symmetric
/// extension for indices outside the signal.
pub fn resample_signal_1d(sig: &Signal, positions: &[f64], kernel: InterpolationKernel) -> Vec<f64> {
    let n = sig.samples.len();
    positions
        .iter()
        .map(|&x| {
            let mut acc = 0.0;
            for_each_tap(kernel, x / sig.step, |k, w| acc += w * sig.samples[reflect(k, n)]);
            acc
        })
        .collect()
}

/// Coefficients of the forward map `X' = a0 + a1·x + a2·y`, `Y' = b0 + b1·x + b2·y`
/// from source to output pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

impl AffineParams {
    pub const IDENTITY: AffineParams = AffineParams {
        a0: 0.0,
        a1: 1.0,
        a2: 0.0,
        b0: 0.0,
        b1: 0.0,
        b2: 1.0,
    };

    pub fn translation(dx: f64, dy: f64) -> Self {
        AffineParams {
            a0: dx,
            b0: dy,
            ..Self::IDENTITY
        }
    }

    /// Wraps the linear part `[[m00, m01], [m10, m11]]` so that `(cx, cy)` stays fixed.
    pub fn about_center(m: [[f64; 2]; 2], cx: f64, cy: f64) -> Self {
        let [[a1, a2], [b1, b2]] = m;
        AffineParams {
            a0: cx - (a1 * cx + a2 * cy),
            a1,
            a2,
            b0: cy - (b1 * cx + b2 * cy),
            b1,
            b2,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a1 * self.b2 - self.a2 * self.b1
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a0 + self.a1 * x + self.a2 * y, self.b0 + self.b1 * x + self.b2 * y)
    }

    /// The inverse map (output to source).
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NonInvertible(det));
        }
        let (a1, a2) = (self.b2 / det, -self.a2 / det);
        let (b1, b2) = (-self.b1 / det, self.a1 / det);
        Ok(AffineParams {
            a0: -(a1 * self.a0 + a2 * self.b0),
            a1,
            a2,
            b0: -(b1 * self.a0 + b2 * self.b0),
            b1,
            b2,
        })
    }
}

impl std::fmt::Display for AffineParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "a0={} a1={} a2={} b0={} b1={} b2={}",
            self.a0, self.a1, self.a2, self.b0, self.b1, self.b2
        )
    }
}

/// Warps `img` by `params` using inverse mapping and separable interpolation.
///
/// The output keeps the input dimensions. Source coordinates outside the image
/// are read through symmetric extension and the result is clamped to `[0, 1]`.
pub fn apply_affine(img: &GrayImage, params: &AffineParams, kernel: InterpolationKernel) -> Result<GrayImage> {
    let inv = params.inverse()?;
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(w * h);
    let mut xtaps: Vec<(usize, f64)> = Vec::with_capacity(5);
    for oy in 0..h {
        for ox in 0..w {
            let (sx, sy) = inv.apply(ox as f64, oy as f64);
            xtaps.clear();
            for_each_tap(kernel, sx, |k, wt| xtaps.push((reflect(k, w), wt)));
            let mut acc = 0.0;
            for_each_tap(kernel, sy, |l, wy| {
                let row = reflect(l, h);
                let mut racc = 0.0;
                for &(col, wx) in &xtaps {
                    racc += wx * img.get(col, row);
                }
                acc += wy * racc;
            });
            out.push(acc);
        }
    }
    GrayImage::from_clamped(w, h, out)
}
