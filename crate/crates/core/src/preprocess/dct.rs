//! Orthonormal type-II 2-D DCT via separable basis matrices.

use crate::field::Field;

/// `n×n` orthonormal DCT-II matrix, row `k` = basis function `k`.
fn basis(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    let nf = n as f64;
    for k in 0..n {
        let alpha = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        for i in 0..n {
            m[k * n + i] = alpha * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos();
        }
    }
    m
}

/// `rows: out[y][x] = Σ_i B[x][i]·in[y][i]` (or `Bᵀ` when `transpose`).
fn along_rows(f: &Field, b: &[f64], transpose: bool) -> Field {
    let n = f.width;
    let mut out = Field::zeros(f.width, f.height);
    for y in 0..f.height {
        let row = &f.values[y * n..(y + 1) * n];
        for k in 0..n {
            let mut acc = 0.0;
            for (i, &v) in row.iter().enumerate() {
                let c = if transpose { b[i * n + k] } else { b[k * n + i] };
                acc += c * v;
            }
            out.values[y * n + k] = acc;
        }
    }
    out
}

fn along_cols(f: &Field, b: &[f64], transpose: bool) -> Field {
    let (w, h) = (f.width, f.height);
    let mut out = Field::zeros(w, h);
    for k in 0..h {
        for i in 0..h {
            let c = if transpose { b[i * h + k] } else { b[k * h + i] };
            if c == 0.0 {
                continue;
            }
            for x in 0..w {
                out.values[k * w + x] += c * f.values[i * w + x];
            }
        }
    }
    out
}

pub fn dct2(f: &Field) -> Field {
    let rows = along_rows(f, &basis(f.width), false);
    along_cols(&rows, &basis(f.height), false)
}

pub fn idct2(coeffs: &Field) -> Field {
    let cols = along_cols(coeffs, &basis(coeffs.height), true);
    along_rows(&cols, &basis(coeffs.width), true)
}

/// JPEG-style zig-zag scan order of a `w×h` grid, as `(x, y)` pairs.
pub fn zigzag(w: usize, h: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(w * h);
    for s in 0..(w + h - 1) {
        let mut diag: Vec<(usize, usize)> = (0..=s)
            .filter_map(|y| {
                let x = s - y;
                (x < w && y < h).then_some((x, y))
            })
            .collect();
        if s % 2 == 0 {
            diag.reverse();
        }
        order.extend(diag);
    }
    order
}

/// The first `k` zig-zag ordered coefficients of `dct2(f)`.
pub fn dct_lowfreq(f: &Field, k: usize) -> Vec<f64> {
    let c = dct2(f);
    zigzag(c.width, c.height)
        .into_iter()
        .take(k)
        .map(|(x, y)| c.get(x, y))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(w: usize, h: usize, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field {
            width: w,
            height: h,
            values: (0..w * h).map(|_| rng.random::<f64>()).collect(),
        }
    }

    #[test]
    fn constant_has_only_dc() {
        let f = Field {
            width: 6,
            height: 4,
            values: vec![0.3; 24],
        };
        let c = dct2(&f);
        assert!((c.get(0, 0) - 0.3 * 24f64.sqrt()).abs() < 1e-12);
        for (i, &v) in c.values.iter().enumerate().skip(1) {
            assert!(v.abs() < 1e-12, "coefficient {i} = {v}");
        }
    }

    #[test]
    fn parseval_and_roundtrip() {
        for (w, h, seed) in [(8, 8, 1), (20, 20, 2), (13, 7, 3)] {
            let f = random_field(w, h, seed);
            let c = dct2(&f);
            let e_in: f64 = f.values.iter().map(|v| v * v).sum();
            let e_out: f64 = c.values.iter().map(|v| v * v).sum();
            assert!((e_in - e_out).abs() <= 1e-9 * e_in);
            let back = idct2(&c);
            for (a, b) in back.values.iter().zip(&f.values) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn matches_direct_definition() {
        let f = random_field(5, 3, 9);
        let c = dct2(&f);
        let alpha = |k: usize, n: usize| {
            if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            }
        };
        for v in 0..3 {
            for u in 0..5 {
                let mut s = 0.0;
                for y in 0..3 {
                    for x in 0..5 {
                        s += f.get(x, y)
                            * (std::f64::consts::PI * (2 * x + 1) as f64 * u as f64 / 10.0).cos()
                            * (std::f64::consts::PI * (2 * y + 1) as f64 * v as f64 / 6.0).cos();
                    }
                }
                assert!((c.get(u, v) - alpha(u, 5) * alpha(v, 3) * s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zigzag_prefix() {
        assert_eq!(
            zigzag(4, 4)[..6].to_vec(),
            vec![(0, 0), (1, 0), (0, 1), (0, 2), (1, 1), (2, 0)]
        );
        assert_eq!(zigzag(3, 5).len(), 15);
    }
}
