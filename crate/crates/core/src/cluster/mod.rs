//! Outlier-aware clustering in Euclidean embedding space.

pub mod distance;
pub mod hdbscan;
pub mod kmeans;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::model::EmbeddingMatrix;

pub use distance::{pairwise_distances, DistanceEngine, PointSet, Sequential, Unrolled};
pub use hdbscan::{hdbscan_fit, HdbscanConfig, HdbscanFit, MstStrategy};
pub use kmeans::{kmeans_fit, KMeansConfig, KMeansFit};

/// Label reserved for points outside every cluster.
pub const NOISE: i32 = -1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("{rows} rows is fewer than the required {required}")]
    TooFewRows { rows: usize, required: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("query has {actual} dimensions, data has {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AlgorithmMeta {
    KMeans {
        k: usize,
        n_init: usize,
        max_iters: usize,
        seed: u64,
        tol: f64,
        inertia: f64,
    },
    Hdbscan {
        min_cluster_size: usize,
        min_samples: usize,
        /// Fraction of points the algorithm itself labelled as noise.
        noise_fraction: f64,
    },
}

/// Per-point cluster assignment plus an outlier score (larger is more outlying).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusteringResult {
    /// Dense labels `0..n_clusters`, or [`NOISE`].
    pub assignments: Vec<i32>,
    pub outlier_scores: Vec<f64>,
    pub n_clusters: usize,
    pub meta: AlgorithmMeta,
}

impl ClusteringResult {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn noise_count(&self) -> usize {
        self.assignments.iter().filter(|&&l| l == NOISE).count()
    }

    /// Whether the labels came from a density-based run that marks its own noise.
    pub fn marks_noise(&self) -> bool {
        matches!(self.meta, AlgorithmMeta::Hdbscan { .. })
    }
}

/// Renumbers labels by first appearance so that equal partitions compare equal.
/// Noise stays [`NOISE`].
pub fn canonical_labels(labels: &[i32]) -> Vec<i32> {
    let mut map: BTreeMap<i32, i32> = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            if l == NOISE {
                return NOISE;
            }
            let next = map.len() as i32;
            *map.entry(l).or_insert(next)
        })
        .collect()
}

pub(crate) fn points_of(data: &EmbeddingMatrix) -> PointSet {
    PointSet::from_matrix(data)
}
