use crate::error::{Error, Result};

/// Biased autocovariance `R(0..=K)` of a sequence of length `source_length`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutoCovSequence {
    pub values: Vec<f64>,
    pub source_length: usize,
}

impl AutoCovSequence {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }
}

/// `R(k) = (1/N) Σ_{i=0}^{N−1−k} (v[i+k] − v̄)(v[i] − v̄)` for `k = 0..=max_lag`.
pub fn autocovariance(v: &[f64], max_lag: usize) -> Result<AutoCovSequence> {
    let n = v.len();
    if max_lag >= n {
        return Err(Error::param(format!(
            "max lag {max_lag} must be below sequence length {n}"
        )));
    }
    // A constant sequence must give exact zeros; sum/n can miss the value by an ulp.
    let mean = if v.iter().all(|&x| x == v[0]) {
        v[0]
    } else {
        v.iter().sum::<f64>() / n as f64
    };
    let dev: Vec<f64> = v.iter().map(|&x| x - mean).collect();
    let values = (0..=max_lag)
        .map(|k| dev[k..].iter().zip(&dev[..n - k]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect();
    Ok(AutoCovSequence {
        values,
        source_length: n,
    })
}
