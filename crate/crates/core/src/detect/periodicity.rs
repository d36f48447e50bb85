use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::autocov::AutoCovSequence;

/// Magnitude of the DFT of the autocovariance mirrored to even symmetry.
///
/// Lags `0..=K` become the length-`2K` sequence `r0 … rK rK−1 … r1`; the
/// returned vector holds bins `0..=K` and bin `j` has frequency `j / 2K`.
pub fn mirrored_spectrum(acov: &AutoCovSequence) -> Vec<f64> {
    let r = &acov.values;
    let k = r.len() - 1;
    if k == 0 {
        return vec![r[0].abs()];
    }
    let m = 2 * k;
    let mut buf: Vec<Complex<f64>> = (0..m)
        .map(|i| Complex::new(if i <= k { r[i] } else { r[m - i] }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf[..=k].iter().map(|c| c.norm()).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Dominant non-DC frequency (cycles/sample) and its peak-to-median strength.
///
/// The lowest `dc_exclusion_bins` bins are skipped. Ties go to the lower
/// frequency. An all-zero sequence scores `(0, 0)`; a zero median caps the
/// ratio at `1 / f64::EPSILON`.
pub fn periodicity_score(acov: &AutoCovSequence, dc_exclusion_bins: usize) -> (f64, f64) {
    score_spectrum(
        &mirrored_spectrum(acov),
        acov.values.iter().all(|&v| v == 0.0),
        dc_exclusion_bins,
    )
}

pub(crate) fn score_spectrum(spectrum: &[f64], all_zero: bool, dc_exclusion_bins: usize) -> (f64, f64) {
    if all_zero || spectrum.len() <= dc_exclusion_bins {
        return (0.0, 0.0);
    }
    let m = 2 * (spectrum.len() - 1);
    let remaining = &spectrum[dc_exclusion_bins..];
    let (mut best_j, mut best) = (0, f64::NEG_INFINITY);
    for (j, &v) in remaining.iter().enumerate() {
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let freq = (best_j + dc_exclusion_bins) as f64 / m as f64;
    let med = median(remaining);
    let strength = if best <= 0.0 {
        0.0
    } else {
        best / med.max(best * f64::EPSILON)
    };
    (freq, strength)
}
