use crate::error::{Error, Result};
use crate::field::Field;
use crate::image::{reflect, GrayImage};
use crate::synth::InterpolationKernel;

/// Taps of `[1, -1]` convolved with itself `n` times: `(-1)^j C(n, j)`.
pub fn difference_taps(n: usize) -> Vec<f64> {
    let mut taps = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; taps.len() + 1];
        for (j, &t) in taps.iter().enumerate() {
            next[j] += t;
            next[j + 1] -= t;
        }
        taps = next;
    }
    taps
}

/// `n`-th order finite difference, same length as the input.
///
/// `y[i] = Σ_j (-1)^j C(n,j) · x[i + ⌊n/2⌋ − j]` with symmetric extension, so
/// `n = 2` is the centred `[1, -2, 1]` stencil.
pub fn derivative_n(sig: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::param("derivative order must be at least 1"));
    }
    if sig.len() <= n {
        return Err(Error::param(format!(
            "sequence of length {} too short for derivative order {n}",
            sig.len()
        )));
    }
    let taps = difference_taps(n);
    let shift = (n / 2) as isize;
    let len = sig.len();
    Ok((0..len as isize)
        .map(|i| {
            taps.iter()
                .enumerate()
                .map(|(j, &c)| c * sig[reflect(i + shift - j as isize, len)])
                .sum()
        })
        .collect())
}

/// `|D^n b|` with the derivative taken along each row.
pub fn image_derivative_magnitude(img: &GrayImage, n: usize) -> Result<Field> {
    if img.width() <= n + 1 {
        return Err(Error::param(format!(
            "image width {} too small for derivative order {n}",
            img.width()
        )));
    }
    let mut values = Vec::with_capacity(img.pixels().len());
    for row in img.pixels().chunks(img.width()) {
        values.extend(derivative_n(row, n)?.into_iter().map(f64::abs));
    }
    Ok(Field {
        width: img.width(),
        height: img.height(),
        values,
    })
}

/// Variance of the `n`-th finite difference of a unit-variance white signal
/// interpolated with `kernel` at sampling step `step`, evaluated at `x`.
///
/// Returns `Σ_k d_k(x)²` where `d_k(x) = Σ_j (-1)^j C(n,j) · w((x + ⌊n/2⌋ − j)/step − k)`,
/// i.e. the finite difference is taken on the unit output grid that
/// [`derivative_n`] operates on.
pub fn theoretical_derivative_variance(kernel: InterpolationKernel, n: usize, x: f64, step: f64) -> f64 {
    let taps = difference_taps(n);
    let shift = (n / 2) as f64;
    let lo = ((x + shift - n as f64) / step).floor() as i64 - 3;
    let hi = ((x + shift) / step).floor() as i64 + 3;
    (lo..=hi)
        .map(|k| {
            let d: f64 = taps
                .iter()
                .enumerate()
                .map(|(j, &c)| c * kernel.weight((x + shift - j as f64) / step - k as f64))
                .sum();
            d * d
        })
        .sum()
}
