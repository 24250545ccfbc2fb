use alloc::vec;
use alloc::vec::Vec;

use super::eigen::symmetric_eigen;
use crate::math;
use crate::model::EmbeddingMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PcaError {
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("k = {k} outside 1..={max}")]
    ComponentsOutOfRange { k: usize, max: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("input has {actual} columns, model expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Principal axes of a data set, ordered by descending explained variance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PcaModel {
    pub dims: usize,
    pub mean: Vec<f64>,
    /// `k x dims`, row-major, orthonormal rows. The largest-magnitude entry
    /// of every row is positive.
    pub components: Vec<f64>,
    pub explained_variance: Vec<f64>,
    /// Sum of the per-column variances of the fit data.
    pub total_variance: f64,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.dims..(i + 1) * self.dims]
    }

    /// Projects one row into component space.
    pub fn project(&self, row: &[f32]) -> Vec<f64> {
        (0..self.k())
            .map(|c| {
                self.component(c)
                    .iter()
                    .zip(row.iter().zip(&self.mean))
                    .map(|(w, (&x, m))| w * (x as f64 - m))
                    .sum()
            })
            .collect()
    }

    /// Maps component-space coordinates back to the input space.
    pub fn reconstruct(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, &z) in coords.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.component(c)) {
                *o += z * w;
            }
        }
        out
    }
}

/// Fits `k` principal components with the 1/(N-1) covariance normalisation.
pub fn pca_fit(data: &EmbeddingMatrix, k: usize) -> Result<PcaModel, PcaError> {
    let values: Vec<f64> = data.data().iter().map(|&v| v as f64).collect();
    pca_fit_with(&values, data.rows(), data.dims(), k)
}

/// [`pca_fit`] over a row-major `rows x dims` slice of doubles.
pub fn pca_fit_with(values: &[f64], rows: usize, dims: usize, k: usize) -> Result<PcaModel, PcaError> {
    if rows < 2 {
        return Err(PcaError::TooFewRows(rows));
    }
    let max = (rows - 1).min(dims);
    if k == 0 || k > max {
        return Err(PcaError::ComponentsOutOfRange { k, max });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(PcaError::NonFinite);
    }

    let mut mean = vec![0.0; dims];
    for row in values.chunks_exact(dims) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= rows as f64);
    let mut centered = values.to_vec();
    for row in centered.chunks_exact_mut(dims) {
        for (v, m) in row.iter_mut().zip(&mean) {
            *v -= m;
        }
    }
    let denom = (rows - 1) as f64;
    let total_variance = centered.iter().map(|v| v * v).sum::<f64>() / denom;

    let (mut components, explained_variance) = if rows - 1 >= dims {
        covariance_route(&centered, dims, k, denom)
    } else {
        gram_route(&centered, rows, dims, k, denom)
    };
    for row in components.chunks_exact_mut(dims) {
        fix_sign(row);
    }
    Ok(PcaModel {
        dims,
        mean,
        components,
        explained_variance,
        total_variance,
    })
}

fn covariance_route(x: &[f64], dims: usize, k: usize, denom: f64) -> (Vec<f64>, Vec<f64>) {
    let cov_row = |i: usize| -> Vec<f64> {
        let mut acc = vec![0.0; i + 1];
        for r in x.chunks_exact(dims) {
            let xi = r[i];
            if xi != 0.0 {
                for (a, &xj) in acc.iter_mut().zip(&r[..=i]) {
                    *a += xi * xj;
                }
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let lower: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..dims).into_par_iter().map(cov_row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let lower: Vec<Vec<f64>> = (0..dims).map(cov_row).collect();

    let mut cov = vec![0.0; dims * dims];
    for (i, row) in lower.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            cov[i * dims + j] = v / denom;
            cov[j * dims + i] = v / denom;
        }
    }
    let eig = symmetric_eigen(&cov, dims);
    let components = eig.vectors[..k * dims].to_vec();
    let variance = eig.values[..k].iter().map(|&v| v.max(0.0)).collect();
    (components, variance)
}

fn gram_route(x: &[f64], rows: usize, dims: usize, k: usize, denom: f64) -> (Vec<f64>, Vec<f64>) {
    let mut gram = vec![0.0; rows * rows];
    for i in 0..rows {
        let ri = &x[i * dims..(i + 1) * dims];
        for j in 0..=i {
            let rj = &x[j * dims..(j + 1) * dims];
            let v = ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>() / denom;
            gram[i * rows + j] = v;
            gram[j * rows + i] = v;
        }
    }
    let eig = symmetric_eigen(&gram, rows);
    let top = eig.values[0].max(0.0);
    let cutoff = top * 1e-10;

    let mut components: Vec<f64> = Vec::with_capacity(k * dims);
    let mut variance = Vec::with_capacity(k);
    for c in 0..k {
        let lambda = eig.values[c];
        if lambda > cutoff && lambda > 0.0 {
            let u = eig.vector(c);
            let scale = 1.0 / math::sqrt(lambda * denom);
            let mut v = vec![0.0; dims];
            for (r, &ur) in u.iter().enumerate() {
                if ur != 0.0 {
                    for (vd, xd) in v.iter_mut().zip(&x[r * dims..(r + 1) * dims]) {
                        *vd += ur * xd;
                    }
                }
            }
            v.iter_mut().for_each(|t| *t *= scale);
            components.extend_from_slice(&v);
            variance.push(lambda);
        } else {
            variance.push(0.0);
            components.extend(core::iter::repeat(0.0).take(dims));
        }
    }
    orthonormalize(&mut components, dims, &variance, cutoff);
    (components, variance)
}

/// Re-orthogonalises the supported directions and fills zero-variance slots
/// with unit basis vectors orthogonal to everything before them.
fn orthonormalize(components: &mut [f64], dims: usize, variance: &[f64], cutoff: f64) {
    let mut probe = 0usize;
    for (c, &var) in variance.iter().enumerate() {
        let mut supported = var > cutoff && var > 0.0;
        loop {
            let (done, rest) = components.split_at_mut(c * dims);
            let row = &mut rest[..dims];
            if !supported {
                row.iter_mut().for_each(|v| *v = 0.0);
                row[probe % dims] = 1.0;
                probe += 1;
            }
            for _ in 0..2 {
                for prev in done.chunks_exact(dims) {
                    let dot: f64 = prev.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                    for (r, p) in row.iter_mut().zip(prev) {
                        *r -= dot * p;
                    }
                }
            }
            let norm = math::sqrt(row.iter().map(|v| v * v).sum::<f64>());
            if norm > 1e-8 {
                row.iter_mut().for_each(|v| *v /= norm);
                break;
            }
            supported = false;
        }
    }
}

fn fix_sign(row: &mut [f64]) {
    let mut best = 0usize;
    for (i, v) in row.iter().enumerate() {
        if math::abs(*v) > math::abs(row[best]) {
            best = i;
        }
    }
    if row[best] < 0.0 {
        row.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Centers `data` with the model mean and projects it onto the components.
pub fn pca_transform(model: &PcaModel, data: &EmbeddingMatrix) -> Result<EmbeddingMatrix, PcaError> {
    if data.dims() != model.dims {
        return Err(PcaError::DimensionMismatch {
            expected: model.dims,
            actual: data.dims(),
        });
    }
    let k = model.k();
    let mut out = Vec::with_capacity(data.rows() * k);
    for row in data.iter_rows() {
        out.extend(model.project(row).into_iter().map(|v| v as f32));
    }
    EmbeddingMatrix::new(data.rows(), k, out, data.row_ids().to_vec()).map_err(|_| PcaError::NonFinite)
}
