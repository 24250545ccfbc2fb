//! Exact Euclidean distances shared by every clusterer.

use alloc::vec::Vec;

use super::ClusterError;
use crate::math;
use crate::model::EmbeddingMatrix;

/// Row-major points widened to `f64` once, so every distance evaluation
/// works on the same values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    dims: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(n: usize, dims: usize, data: Vec<f64>) -> Result<Self, ClusterError> {
        if data.len() != n * dims {
            return Err(ClusterError::DimensionMismatch {
                expected: n * dims,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinite);
        }
        Ok(Self { n, dims, data })
    }

    pub fn from_matrix(m: &EmbeddingMatrix) -> Self {
        Self {
            n: m.rows(),
            dims: m.dims(),
            data: m.data().iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Squared Euclidean distance kernel.
///
/// Implementations must be symmetric bit for bit: `squared(a, b) == squared(b, a)`.
pub trait DistanceEngine: Sync + Send {
    fn squared(&self, a: &[f64], b: &[f64]) -> f64;

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        math::sqrt(self.squared(a, b))
    }
}

/// Plain left-to-right accumulation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl DistanceEngine for Sequential {
    #[inline]
    fn squared(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = x - y;
                d * d
            })
            .sum()
    }
}

/// Eight independent accumulators; the default kernel.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unrolled;

impl DistanceEngine for Unrolled {
    #[inline]
    fn squared(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = [0.0f64; 8];
        let ca = a.chunks_exact(8);
        let cb = b.chunks_exact(8);
        let (ra, rb) = (ca.remainder(), cb.remainder());
        for (x, y) in ca.zip(cb) {
            let x: &[f64; 8] = x.try_into().expect("chunk of 8");
            let y: &[f64; 8] = y.try_into().expect("chunk of 8");
            for l in 0..8 {
                let d = x[l] - y[l];
                acc[l] += d * d;
            }
        }
        let mut tail = 0.0;
        for (x, y) in ra.iter().zip(rb) {
            let d = x - y;
            tail += d * d;
        }
        ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
    }
}

/// Distances from every query row to every data row, as a `queries x data`
/// row-major matrix.
pub fn pairwise_distances<E: DistanceEngine>(
    engine: &E,
    data: &PointSet,
    queries: &PointSet,
) -> Result<Vec<f64>, ClusterError> {
    if queries.dims() != data.dims() {
        return Err(ClusterError::DimensionMismatch {
            expected: data.dims(),
            actual: queries.dims(),
        });
    }
    const BLOCK: usize = 256;
    let n = data.len();
    let fill = |q: usize, out: &mut [f64]| {
        let qr = queries.row(q);
        for start in (0..n).step_by(BLOCK) {
            let end = (start + BLOCK).min(n);
            for j in start..end {
                out[j] = engine.distance(qr, data.row(j));
            }
        }
    };
    let mut out = alloc::vec![0.0; queries.len() * n];
    if n == 0 {
        return Ok(out);
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(n)
            .enumerate()
            .for_each(|(q, row)| fill(q, row));
    }
    #[cfg(not(feature = "parallel"))]
    for (q, row) in out.chunks_mut(n).enumerate() {
        fill(q, row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn self_distance_is_zero() {
        let p = PointSet::new(2, 3, vec![1.0, 2.0, 3.0, -1.0, 0.5, 8.0]).unwrap();
        let d = pairwise_distances(&Unrolled, &p, &p).unwrap();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[3], 0.0);
        assert_eq!(d[1], d[2]);
    }

    #[test]
    fn unit_vectors() {
        let p = PointSet::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let d = pairwise_distances(&Sequential, &p, &p).unwrap();
        assert!((d[1] - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let p = PointSet::new(1, 2, vec![1.0, 0.0]).unwrap();
        let q = PointSet::new(1, 3, vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            pairwise_distances(&Unrolled, &p, &q),
            Err(ClusterError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernels_are_symmetric() {
        let a = [0.1, 0.7, -3.2, 9.9, 1e-3, 4.4, 2.0];
        let b = [5.1, -0.7, 3.3, 0.9, 1e3, -4.4, 0.25];
        assert_eq!(Unrolled.squared(&a, &b), Unrolled.squared(&b, &a));
        assert_eq!(Sequential.squared(&a, &b), Sequential.squared(&b, &a));
    }
}
