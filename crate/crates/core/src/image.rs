//! Grayscale raster with unit-interval pixels.

use crate::error::{Error, Result};

/// A row-major grayscale image whose pixels lie in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    /// Builds an image, rejecting wrong lengths and out-of-range or non-finite pixels.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::param(format!(
                "pixel buffer has {} values, expected {}",
                pixels.len(),
                width * height
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::param(format!("pixel {i} = {} lies outside [0, 1]", pixels[i])));
        }
        Ok(GrayImage { width, height, pixels })
    }

    /// Builds an image after clamping every value into `[0, 1]`. NaN maps to 0.
    pub fn from_clamped(width: usize, height: usize, mut pixels: Vec<f64>) -> Result<Self> {
        for p in &mut pixels {
            *p = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
        }
        Self::new(width, height, pixels)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::from_clamped(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Pixel lookup with half-sample symmetric extension outside the image.
    #[inline]
    pub fn get_symmetric(&self, x: isize, y: isize) -> f64 {
        self.get(reflect(x, self.width), reflect(y, self.height))
    }

    pub fn is_constant(&self) -> bool {
        let first = self.pixels[0];
        self.pixels.iter().all(|&p| p == first)
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }
}

/// Maps an arbitrary index onto `0..len` by half-sample symmetric extension
/// (`… x1 x0 | x0 x1 … xn-1 | xn-1 xn-2 …`).
#[inline]
pub fn reflect(i: isize, len: usize) -> usize {
    let n = len as isize;
    let period = 2 * n;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CropRect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl CropRect {
    pub fn full(img: &GrayImage) -> Self {
        CropRect {
            x0: 0,
            y0: 0,
            w: img.width(),
            h: img.height(),
        }
    }
}

impl std::str::FromStr for CropRect {
    type Err = Error;

    /// Parses `x0,y0,w,h`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::param(format!("crop '{s}': {e}")))?;
        match parts.as_slice() {
            &[x0, y0, w, h] if w > 0 && h > 0 => Ok(CropRect { x0, y0, w, h }),
            _ => Err(Error::param(format!(
                "crop '{s}' must be x0,y0,w,h with positive w and h"
            ))),
        }
    }
}

pub fn crop(img: &GrayImage, rect: CropRect) -> Result<GrayImage> {
    let CropRect { x0, y0, w, h } = rect;
    let fits = w > 0
        && h > 0
        && x0.checked_add(w).is_some_and(|e| e <= img.width())
        && y0.checked_add(h).is_some_and(|e| e <= img.height());
    if !fits {
        return Err(Error::Bounds {
            x0,
            y0,
            w,
            h,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut pixels = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        let start = y * img.width() + x0;
        pixels.extend_from_slice(&img.pixels()[start..start + w]);
    }
    GrayImage::new(w, h, pixels)
}
