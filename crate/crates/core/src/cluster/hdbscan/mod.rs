//! Density-based hierarchical clustering over mutual-reachability distance.

mod balltree;
pub mod core_distance;
pub mod hierarchy;
pub mod mst;

use alloc::vec::Vec;

use super::distance::{DistanceEngine, PointSet, Unrolled};
use super::{AlgorithmMeta, ClusterError, ClusteringResult, NOISE};
use crate::model::EmbeddingMatrix;
use balltree::BallTree;
pub use core_distance::core_distances;
pub use hierarchy::{CondensedChild, CondensedRow, CondensedTree, LinkageRow};
pub use mst::MstEdge;

/// Above this many points `MstStrategy::Auto` switches from Prim to Borůvka.
pub const PRIM_MAX_POINTS: usize = 50_000;

/// Below this many points core distances come from a plain scan.
const BRUTE_KNN_MAX_POINTS: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MstStrategy {
    #[default]
    Auto,
    Prim,
    Boruvka,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HdbscanConfig {
    pub min_cluster_size: usize,
    /// Neighbour count for core distances, the point itself included.
    pub min_samples: usize,
    /// Reserved for randomized acceleration; the exact path ignores it.
    pub seed: u64,
    pub mst: MstStrategy,
}

impl HdbscanConfig {
    /// `min_samples` defaults to `min_cluster_size`.
    pub fn new(min_cluster_size: usize) -> Self {
        Self {
            min_cluster_size,
            min_samples: min_cluster_size,
            seed: 0,
            mst: MstStrategy::Auto,
        }
    }

    pub fn with_min_samples(mut self, min_samples: usize) -> Self {
        self.min_samples = min_samples;
        self
    }

    pub fn with_strategy(mut self, mst: MstStrategy) -> Self {
        self.mst = mst;
        self
    }
}

impl Default for HdbscanConfig {
    fn default() -> Self {
        Self::new(30)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdbscanFit {
    pub result: ClusteringResult,
    pub core_distances: Vec<f64>,
    /// Sorted by weight, then endpoints.
    pub mst: Vec<MstEdge>,
    pub condensed: CondensedTree,
    /// Indexed by condensed-tree cluster id.
    pub selected: Vec<bool>,
    pub strategy: MstStrategy,
}

impl HdbscanFit {
    pub fn mst_weight(&self) -> f64 {
        self.mst.iter().map(|e| e.weight).sum()
    }
}

pub fn hdbscan_fit(data: &EmbeddingMatrix, cfg: &HdbscanConfig) -> Result<HdbscanFit, ClusterError> {
    hdbscan_fit_points(&Unrolled, &super::points_of(data), cfg)
}

pub fn hdbscan_fit_points<E: DistanceEngine>(
    engine: &E,
    points: &PointSet,
    cfg: &HdbscanConfig,
) -> Result<HdbscanFit, ClusterError> {
    if cfg.min_cluster_size < 2 {
        return Err(ClusterError::InvalidParameter("min_cluster_size must be at least 2"));
    }
    if cfg.min_samples < 1 {
        return Err(ClusterError::InvalidParameter("min_samples must be at least 1"));
    }
    let n = points.len();
    // Fewer rows than min_cluster_size is not an error: no cluster can form,
    // so every point comes back as noise.
    if n == 0 {
        return Err(ClusterError::TooFewRows { rows: 0, required: 1 });
    }
    if points.data().iter().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }

    let strategy = match cfg.mst {
        MstStrategy::Auto if n > PRIM_MAX_POINTS => MstStrategy::Boruvka,
        MstStrategy::Auto => MstStrategy::Prim,
        s => s,
    };
    let (core_sq, mst) = if strategy == MstStrategy::Boruvka || n > BRUTE_KNN_MAX_POINTS {
        let tree = BallTree::build(engine, points);
        let (core_sq, lists) = core_distance::tree_core_sq(engine, &tree, cfg.min_samples);
        let mst = if strategy == MstStrategy::Boruvka {
            mst::boruvka(engine, &tree, &core_sq, &lists)
        } else {
            mst::prim(engine, points, &core_sq)
        };
        (core_sq, mst)
    } else {
        let core_sq = core_distance::brute_core_sq(engine, points, cfg.min_samples);
        let mst = mst::prim(engine, points, &core_sq);
        (core_sq, mst)
    };
    log::debug!("mst built with {:?}: {} edges", strategy, mst.len());

    let linkage = hierarchy::single_linkage(n, &mst);
    let condensed = hierarchy::condense(n, &linkage, cfg.min_cluster_size);
    let selected = hierarchy::select_eom(&condensed);
    let (labels, outlier_scores) = hierarchy::label_points(&condensed, &selected);

    // Dense labels in cluster-id order.
    let mut dense = alloc::vec![NOISE; condensed.n_clusters];
    let mut n_clusters = 0usize;
    for (c, &s) in selected.iter().enumerate() {
        if s {
            dense[c] = n_clusters as i32;
            n_clusters += 1;
        }
    }
    let assignments: Vec<i32> = labels.iter().map(|l| l.map_or(NOISE, |c| dense[c])).collect();
    let noise = assignments.iter().filter(|&&l| l == NOISE).count();

    Ok(HdbscanFit {
        result: ClusteringResult {
            assignments,
            outlier_scores,
            n_clusters,
            meta: AlgorithmMeta::Hdbscan {
                min_cluster_size: cfg.min_cluster_size,
                min_samples: cfg.min_samples,
                noise_fraction: noise as f64 / n as f64,
            },
        },
        core_distances: core_sq.into_iter().map(crate::math::sqrt).collect(),
        mst,
        condensed,
        selected,
        strategy,
    })
}
