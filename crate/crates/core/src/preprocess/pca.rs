//! Principal component analysis.
//!
//! With fewer samples than dimensions the eigenproblem is solved on the
//! `n×n` Gram matrix and lifted back; otherwise on the `D×D` covariance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::FeatureVector;
use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn reconstruct(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, comp) in coeffs.iter().zip(&self.components) {
            for (o, v) in out.iter_mut().zip(comp) {
                *o += c * v;
            }
        }
        out
    }
}

fn sorted_eigen(m: DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
        .collect();
    // Stable sort: equal eigenvalues keep the solver's order.
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Orthonormalizes `v` against `basis`; `None` if nothing independent remains.
fn gram_schmidt(mut v: DVector<f64>, basis: &[DVector<f64>]) -> Option<DVector<f64>> {
    for _ in 0..2 {
        for b in basis {
            let d = b.dot(&v);
            v.axpy(-d, b, 1.0);
        }
    }
    let n = v.norm();
    (n > 1e-10).then(|| v / n)
}

fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

pub fn pca_fit(vectors: &[FeatureVector], k: usize) -> Result<PcaModel> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::param("PCA needs at least two vectors"));
    }
    let d = vectors[0].values.len();
    if let Some(bad) = vectors.iter().position(|v| v.values.len() != d) {
        return Err(Error::param(format!(
            "vector {bad} has length {}, expected {d}",
            vectors[bad].values.len()
        )));
    }
    if k == 0 || k > (n - 1).min(d) {
        return Err(Error::param(format!(
            "k = {k} must lie in 1..={} for {n} vectors of length {d}",
            (n - 1).min(d)
        )));
    }

    let mut mean = vec![0.0; d];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(&v.values) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered = DMatrix::from_fn(n, d, |i, j| vectors[i].values[j] - mean[j]);
    let denom = (n - 1) as f64;

    let pairs: Vec<(f64, DVector<f64>)> = if n < d {
        let gram = &centered * centered.transpose() / denom;
        sorted_eigen(gram)
            .into_iter()
            .map(|(l, u)| {
                let lifted = centered.transpose() * u;
                (l, lifted)
            })
            .collect()
    } else {
        let cov = centered.transpose() * &centered / denom;
        sorted_eigen(cov)
    };

    let top = pairs.first().map(|p| p.0).unwrap_or(0.0).max(0.0);
    let mut components: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut eigenvalues = Vec::with_capacity(k);
    for (l, v) in pairs {
        if components.len() == k {
            break;
        }
        if l <= RANK_TOLERANCE * top {
            break;
        }
        if let Some(mut v) = gram_schmidt(v, &components) {
            fix_sign(&mut v);
            components.push(v);
            eigenvalues.push(l);
        }
    }
    // Rank-deficient data: complete with unit vectors orthogonal to the span.
    let mut axis = 0;
    while components.len() < k && axis < d {
        let mut e = DVector::zeros(d);
        e[axis] = 1.0;
        axis += 1;
        if let Some(mut v) = gram_schmidt(e, &components) {
            fix_sign(&mut v);
            components.push(v);
            eigenvalues.push(0.0);
        }
    }

    Ok(PcaModel {
        mean,
        components: components.into_iter().map(|c| c.iter().copied().collect()).collect(),
        eigenvalues,
    })
}

/// Coordinates of `v` in the component basis: `components · (v − mean)`.
pub fn project_features(model: &PcaModel, v: &FeatureVector) -> Result<FeatureVector> {
    if v.values.len() != model.dim() {
        return Err(Error::param(format!(
            "feature length {} does not match PCA dimension {}",
            v.values.len(),
            model.dim()
        )));
    }
    let centered: Vec<f64> = v.values.iter().zip(&model.mean).map(|(x, m)| x - m).collect();
    let values = model
        .components
        .iter()
        .map(|c| c.iter().zip(&centered).map(|(a, b)| a * b).sum())
        .collect();
    Ok(FeatureVector {
        values,
        source_label: v.source_label.clone(),
    })
}
