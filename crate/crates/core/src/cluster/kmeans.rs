//! Lloyd's algorithm with k-means++ seeding and restarts.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::distance::{DistanceEngine, PointSet, Unrolled};
use super::{AlgorithmMeta, ClusterError, ClusteringResult};
use crate::math;
use crate::seed::derive_seed;
use crate::model::EmbeddingMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    pub n_init: usize,
    pub seed: u64,
    /// Stop once an iteration lowers the inertia by less than this fraction.
    pub tol: f64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iters: 300,
            n_init: 10,
            seed: 0,
            tol: 1e-6,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_init(mut self, n_init: usize) -> Self {
        self.n_init = n_init;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub result: ClusteringResult,
    /// `k x dims`, row-major.
    pub centers: Vec<f64>,
    pub inertia: f64,
    /// Inertia after every assignment step of the winning restart.
    pub inertia_trace: Vec<f64>,
}

pub fn kmeans_fit(data: &EmbeddingMatrix, cfg: &KMeansConfig) -> Result<KMeansFit, ClusterError> {
    kmeans_fit_points(&Unrolled, &super::points_of(data), cfg)
}

/// Runs `n_init` seeded restarts and keeps the one with the lowest inertia
/// (the earliest on ties). Labels are never noise; each point's outlier score
/// is its distance to the assigned center.
pub fn kmeans_fit_points<E: DistanceEngine>(
    engine: &E,
    points: &PointSet,
    cfg: &KMeansConfig,
) -> Result<KMeansFit, ClusterError> {
    if cfg.k == 0 {
        return Err(ClusterError::InvalidParameter("k must be at least 1"));
    }
    if cfg.max_iters == 0 {
        return Err(ClusterError::InvalidParameter("max_iters must be at least 1"));
    }
    if cfg.n_init == 0 {
        return Err(ClusterError::InvalidParameter("n_init must be at least 1"));
    }
    if points.len() < cfg.k {
        return Err(ClusterError::TooFewRows {
            rows: points.len(),
            required: cfg.k,
        });
    }
    if points.data().iter().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }

    let mut best: Option<Run> = None;
    for run in 0..cfg.n_init {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, run as u64));
        let centers = plus_plus_seeds(engine, points, cfg.k, &mut rng);
        let candidate = lloyd(engine, points, centers, cfg);
        if best.as_ref().map_or(true, |b| candidate.inertia < b.inertia) {
            best = Some(candidate);
        }
    }
    let best = best.expect("n_init >= 1");
    let outlier_scores = best.sq_dist.iter().map(|&d| math::sqrt(d)).collect();
    Ok(KMeansFit {
        result: ClusteringResult {
            assignments: best.labels.iter().map(|&l| l as i32).collect(),
            outlier_scores,
            n_clusters: cfg.k,
            meta: AlgorithmMeta::KMeans {
                k: cfg.k,
                n_init: cfg.n_init,
                max_iters: cfg.max_iters,
                seed: cfg.seed,
                tol: cfg.tol,
                inertia: best.inertia,
            },
        },
        centers: best.centers,
        inertia: best.inertia,
        inertia_trace: best.trace,
    })
}

fn plus_plus_seeds<E: DistanceEngine>(
    engine: &E,
    points: &PointSet,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = points.len();
    let dims = points.dims();
    let mut centers = Vec::with_capacity(k * dims);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(points.row(first));
    let mut closest: Vec<f64> = (0..n)
        .map(|i| engine.squared(points.row(i), points.row(first)))
        .collect();
    for _ in 1..k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &w) in closest.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = Some(i);
                    break;
                }
            }
            // Rounding can leave `target` beyond the running sum.
            chosen.unwrap_or_else(|| closest.iter().rposition(|&w| w > 0.0).unwrap_or(0))
        } else {
            rng.random_range(0..n)
        };
        centers.extend_from_slice(points.row(pick));
        for (i, c) in closest.iter_mut().enumerate() {
            let d = engine.squared(points.row(i), points.row(pick));
            if d < *c {
                *c = d;
            }
        }
    }
    centers
}

struct Run {
    labels: Vec<usize>,
    sq_dist: Vec<f64>,
    centers: Vec<f64>,
    inertia: f64,
    trace: Vec<f64>,
}

fn assign<E: DistanceEngine>(
    engine: &E,
    points: &PointSet,
    centers: &[f64],
    labels: &mut [usize],
    sq_dist: &mut [f64],
) {
    let dims = points.dims();
    let nearest = |i: usize| -> (usize, f64) {
        let row = points.row(i);
        let mut best = (0usize, f64::INFINITY);
        for (c, center) in centers.chunks_exact(dims).enumerate() {
            let d = engine.squared(row, center);
            if d < best.1 {
                best = (c, d);
            }
        }
        best
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        labels
            .par_iter_mut()
            .zip(sq_dist.par_iter_mut())
            .enumerate()
            .for_each(|(i, (l, d))| {
                let (c, dd) = nearest(i);
                *l = c;
                *d = dd;
            });
    }
    #[cfg(not(feature = "parallel"))]
    for (i, (l, d)) in labels.iter_mut().zip(sq_dist.iter_mut()).enumerate() {
        let (c, dd) = nearest(i);
        *l = c;
        *d = dd;
    }
}

fn lloyd<E: DistanceEngine>(
    engine: &E,
    points: &PointSet,
    mut centers: Vec<f64>,
    cfg: &KMeansConfig,
) -> Run {
    let n = points.len();
    let dims = points.dims();
    let k = cfg.k;
    let mut labels = vec![0usize; n];
    let mut sq_dist = vec![0.0; n];
    let mut prev_labels: Option<Vec<usize>> = None;
    let mut trace = Vec::new();

    for it in 0..cfg.max_iters {
        assign(engine, points, &centers, &mut labels, &mut sq_dist);
        let inertia: f64 = sq_dist.iter().sum();
        if let Some(&last) = trace.last() {
            debug_assert!(
                inertia <= last * (1.0 + 1e-12) + 1e-300,
                "inertia rose from {last} to {inertia}"
            );
        }
        let converged = match (trace.last(), &prev_labels) {
            (Some(&last), Some(prev)) => *prev == labels || last - inertia <= cfg.tol * last,
            _ => false,
        };
        trace.push(inertia);
        if converged || it + 1 == cfg.max_iters {
            break;
        }
        prev_labels = Some(labels.clone());

        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        // Refill empty clusters with the worst-fitting point of a cluster
        // that can spare one.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut worst: Option<usize> = None;
            for i in 0..n {
                if counts[labels[i]] > 1 && worst.map_or(true, |w| sq_dist[i] > sq_dist[w]) {
                    worst = Some(i);
                }
            }
            if let Some(w) = worst {
                counts[labels[w]] -= 1;
                labels[w] = c;
                sq_dist[w] = 0.0;
                counts[c] = 1;
            }
        }
        let mut sums = vec![0.0; k * dims];
        for (i, &l) in labels.iter().enumerate() {
            for (s, v) in sums[l * dims..(l + 1) * dims].iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let inv = counts[c] as f64;
            for (dst, s) in centers[c * dims..(c + 1) * dims]
                .iter_mut()
                .zip(&sums[c * dims..(c + 1) * dims])
            {
                *dst = s / inv;
            }
        }
    }
    let inertia = *trace.last().expect("at least one iteration");
    Run {
        labels,
        sq_dist,
        centers,
        inertia,
        trace,
    }
}
