use crate::error::{Error, Result};
use crate::image::{reflect, GrayImage};
use crate::pgm::quantize;

/// `k×k` box mean with symmetric extension.
pub fn average_filter(img: &GrayImage, k: usize) -> Result<GrayImage> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::param(format!("filter size must be odd and >= 3, got {k}")));
    }
    let (w, h) = (img.width(), img.height());
    let r = (k / 2) as isize;
    let inv = 1.0 / k as f64;
    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for d in -r..=r {
                acc += img.get(reflect(x as isize + d, w), y);
            }
            rows[y * w + x] = acc * inv;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for d in -r..=r {
                acc += rows[reflect(y as isize + d, h) * w + x];
            }
            out[y * w + x] = acc * inv;
        }
    }
    GrayImage::from_clamped(w, h, out)
}

/// 256-bin histogram of the quantized pixel levels.
pub fn histogram(img: &GrayImage) -> [usize; 256] {
    let mut hist = [0usize; 256];
    for &p in img.pixels() {
        hist[quantize(p) as usize] += 1;
    }
    hist
}

/// Shannon entropy (bits) of the 256-level histogram.
pub fn histogram_entropy(img: &GrayImage) -> f64 {
    let n = img.pixels().len() as f64;
    histogram(img)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Global histogram equalization over 256 levels.
///
/// Level `v` maps to `(cdf(v) − cdf_min) / (N − cdf_min)`. Images with a
/// single occupied level are returned unchanged.
pub fn histogram_equalize(img: &GrayImage) -> GrayImage {
    let hist = histogram(img);
    let n = img.pixels().len();
    let mut cdf = [0usize; 256];
    let mut running = 0;
    for (c, &h) in cdf.iter_mut().zip(hist.iter()) {
        running += h;
        *c = running;
    }
    let cdf_min = hist.iter().position(|&h| h > 0).map(|i| cdf[i]).unwrap_or(0);
    if n == cdf_min {
        return img.clone();
    }
    let denom = (n - cdf_min) as f64;
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| (cdf[quantize(p) as usize] - cdf_min) as f64 / denom)
        .collect();
    GrayImage::from_clamped(img.width(), img.height(), pixels).expect("dimensions unchanged")
}

/// Linearly interpolated percentile of `sorted` (`pct` in `[0, 100]`).
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let pos = pct / 100.0 * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Maps the `[lo_pct, hi_pct]` percentile range onto `[0, 1]`, clamping outside.
pub fn contrast_stretch(img: &GrayImage, lo_pct: f64, hi_pct: f64) -> Result<GrayImage> {
    if !(0.0 <= lo_pct && lo_pct < hi_pct && hi_pct <= 100.0) {
        return Err(Error::param(format!(
            "percentiles must satisfy 0 <= lo < hi <= 100, got ({lo_pct}, {hi_pct})"
        )));
    }
    let mut sorted = img.pixels().to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = percentile(&sorted, lo_pct);
    let hi = percentile(&sorted, hi_pct);
    if hi <= lo {
        return Ok(img.clone());
    }
    let scale = 1.0 / (hi - lo);
    let pixels = img.pixels().iter().map(|&p| (p - lo) * scale).collect();
    GrayImage::from_clamped(img.width(), img.height(), pixels)
}

fn source_coord(o: usize, out: usize, src: usize) -> f64 {
    if out == 1 {
        (src - 1) as f64 / 2.0
    } else {
        (o * (src - 1)) as f64 / (out - 1) as f64
    }
}

/// Bilinear resize with corner-aligned sampling (output corners hit input corners).
pub fn resize_bilinear(img: &GrayImage, out_w: usize, out_h: usize) -> Result<GrayImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::param("output dimensions must be positive"));
    }
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(out_w * out_h);
    for oy in 0..out_h {
        let sy = source_coord(oy, out_h, h);
        let y0 = (sy.floor() as usize).min(h - 1);
        let y1 = (y0 + 1).min(h - 1);
        let ty = sy - y0 as f64;
        for ox in 0..out_w {
            let sx = source_coord(ox, out_w, w);
            let x0 = (sx.floor() as usize).min(w - 1);
            let x1 = (x0 + 1).min(w - 1);
            let tx = sx - x0 as f64;
            let lerp = |a: f64, b: f64, t: f64| if t == 0.0 { a } else { a + t * (b - a) };
            let top = lerp(img.get(x0, y0), img.get(x1, y0), tx);
            let bottom = lerp(img.get(x0, y1), img.get(x1, y1), tx);
            out.push(lerp(top, bottom, ty));
        }
    }
    GrayImage::from_clamped(out_w, out_h, out)
}
