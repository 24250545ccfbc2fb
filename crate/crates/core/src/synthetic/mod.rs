//! Long-tail synthetic track collections with known ground truth.

mod stream;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math;
use crate::model::{
    AnnotatedTrack, Annotation, BoundingBox, EmbeddingError, EmbeddingMatrix, FrameObservation,
    MaskGeometry, Track, TrackId, TrackLabel, TrackletId,
};
use crate::seed::derive_seed;

pub use stream::{fragment_track, generate_tracklet_stream, generate_tracklet_stream_with, JunctionStyle, TrackletStream};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyntheticError {
    #[error("invalid spec: {0}")]
    InvalidSpec(&'static str),
    #[error("could not place {categories} centres {separation} apart in {dims} dimensions")]
    InfeasibleSeparation {
        categories: usize,
        dims: usize,
        separation: f64,
    },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticSpec {
    pub n_categories: usize,
    pub zipf_exponent: f64,
    pub n_tracks: usize,
    pub embedding_dims: usize,
    /// Per-coordinate standard deviation of crops around their centre.
    pub cluster_spread: f64,
    /// Minimum distance between category centres; also the sphere radius
    /// they are drawn on.
    pub center_separation: f64,
    pub outlier_fraction: f64,
    pub tracking_error_fraction: f64,
    pub seed: u64,
    /// The first this-many categories count as known to the detector
    /// (all of them when larger than `n_categories`).
    pub n_known_categories: usize,
    /// Inclusive range of crops (and frames) per track.
    pub crops_per_track: (usize, usize),
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_categories: 36,
            zipf_exponent: 1.1,
            n_tracks: 12_000,
            embedding_dims: 50,
            cluster_spread: 1.0,
            center_separation: 100.0,
            outlier_fraction: 0.0,
            tracking_error_fraction: 0.0,
            seed: 0,
            n_known_categories: 12,
            crops_per_track: (3, 30),
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SyntheticError> {
        let bad = |m| Err(SyntheticError::InvalidSpec(m));
        if self.n_categories == 0 {
            return bad("n_categories must be at least 1");
        }
        if self.embedding_dims == 0 {
            return bad("embedding_dims must be at least 1");
        }
        if !(self.zipf_exponent > 0.0 && self.zipf_exponent.is_finite()) {
            return bad("zipf_exponent must be positive");
        }
        if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
            return bad("cluster_spread must be positive");
        }
        if !(self.center_separation > 0.0 && self.center_separation.is_finite()) {
            return bad("center_separation must be positive");
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) || !(0.0..1.0).contains(&self.tracking_error_fraction) {
            return bad("outlier and tracking-error fractions must lie in [0, 1)");
        }
        if self.outlier_fraction + self.tracking_error_fraction >= 1.0 {
            return bad("outlier_fraction + tracking_error_fraction must be below 1");
        }
        if self.tracking_error_fraction > 0.0 && self.n_categories < 2 {
            return bad("tracking errors need at least two categories");
        }
        let (lo, hi) = self.crops_per_track;
        if lo == 0 || lo > hi {
            return bad("crops_per_track must be a non-empty range starting at 1 or more");
        }
        Ok(())
    }

    pub fn category_name(&self, c: usize) -> String {
        format!("cat{c:02}")
    }

    pub fn outlier_count(&self) -> usize {
        libm::round(self.outlier_fraction * self.n_tracks as f64) as usize
    }

    pub fn error_count(&self) -> usize {
        libm::round(self.tracking_error_fraction * self.n_tracks as f64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticTruth {
    pub category_names: Vec<String>,
    /// Per track.
    pub category: Vec<usize>,
    pub outlier: Vec<bool>,
    pub tracking_error: Vec<bool>,
    /// `n_categories x dims`, row-major.
    pub centers: Vec<f64>,
    /// Zipf allocation by category.
    pub category_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCollection {
    pub tracks: Vec<AnnotatedTrack>,
    /// One row per crop, ids `"<track>#<crop>"`.
    pub crops: EmbeddingMatrix,
    pub truth: SyntheticTruth,
}

/// Splits `n` into `categories` sizes proportional to `rank^-exponent`
/// (rank starting at 1), rounding by largest remainder with ties to the
/// lower rank.
pub fn zipf_allocation(n: usize, categories: usize, exponent: f64) -> Vec<usize> {
    if categories == 0 {
        return Vec::new();
    }
    let weights: Vec<f64> = (1..=categories).map(|r| math::powf(r as f64, -exponent)).collect();
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|&q| math::floor(q) as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..categories).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - sizes[a] as f64, quotas[b] - sizes[b] as f64);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &c in order.iter().take(n.saturating_sub(assigned)) {
        sizes[c] += 1;
    }
    sizes
}

/// Frame horizon over which track start frames are spread.
const START_HORIZON: u64 = 200;

/// Per-track layout shared by the collection and the tracklet stream.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TrackLayout {
    pub start: u64,
    pub len: usize,
}

pub(crate) fn track_rng(spec: &SyntheticSpec, track: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, track as u64))
}

pub(crate) fn layout(rng: &mut ChaCha8Rng, spec: &SyntheticSpec) -> TrackLayout {
    let (lo, hi) = spec.crops_per_track;
    let len = rng.random_range(lo..=hi);
    let start = rng.random_range(0..START_HORIZON);
    TrackLayout { start, len }
}

/// Each track moves along its own horizontal lane, so boxes of different
/// tracks never overlap.
pub(crate) fn lane_box(track: usize, step: usize) -> MaskGeometry {
    MaskGeometry::Box(BoundingBox::new(3.0 * step as f64, 20.0 * track as f64, 10.0, 10.0))
}

fn unit_sphere(rng: &mut ChaCha8Rng, dims: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dims).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = math::sqrt(v.iter().map(|x| x * x).sum());
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn place_centers(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, SyntheticError> {
    const MAX_ATTEMPTS: usize = 10_000;
    let dims = spec.embedding_dims;
    let radius = spec.center_separation;
    let mut centers: Vec<f64> = Vec::with_capacity(spec.n_categories * dims);
    for _ in 0..spec.n_categories {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let c: Vec<f64> = unit_sphere(rng, dims).into_iter().map(|x| x * radius).collect();
            let far = centers.chunks_exact(dims).all(|o| {
                let d2: f64 = o.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                math::sqrt(d2) >= spec.center_separation
            });
            if far {
                centers.extend(c);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(SyntheticError::InfeasibleSeparation {
                categories: spec.n_categories,
                dims,
                separation: spec.center_separation,
            });
        }
    }
    Ok(centers)
}

/// Generates tracks, per-crop embeddings and the ground truth behind them.
/// The output is a pure function of `spec`.
pub fn generate_collection(spec: &SyntheticSpec) -> Result<SyntheticCollection, SyntheticError> {
    spec.validate()?;
    let n = spec.n_tracks;
    let dims = spec.embedding_dims;
    let mut master = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, u64::MAX));
    let centers = place_centers(spec, &mut master)?;
    let sizes = zipf_allocation(n, spec.n_categories, spec.zipf_exponent);

    let mut category: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| core::iter::repeat(c).take(s)).collect();
    category.shuffle(&mut master);
    let mut roles: Vec<usize> = (0..n).collect();
    roles.shuffle(&mut master);
    let (n_out, n_err) = (spec.outlier_count(), spec.error_count());
    let mut outlier = vec![false; n];
    let mut tracking_error = vec![false; n];
    for &t in &roles[..n_out] {
        outlier[t] = true;
    }
    for &t in &roles[n_out..n_out + n_err] {
        tracking_error[t] = true;
    }

    let names: Vec<String> = (0..spec.n_categories).map(|c| spec.category_name(c)).collect();
    let box_half = 10.0 * spec.center_separation;
    let make = |t: usize| -> (AnnotatedTrack, Vec<f32>, usize) {
        let mut rng = track_rng(spec, t);
        let lay = layout(&mut rng, spec);
        let cat = category[t];
        let base: Vec<f64> = if outlier[t] {
            (0..dims).map(|_| rng.random_range(-box_half..box_half)).collect()
        } else if tracking_error[t] {
            let other = (cat + rng.random_range(1..spec.n_categories)) % spec.n_categories;
            centers[other * dims..(other + 1) * dims].to_vec()
        } else {
            centers[cat * dims..(cat + 1) * dims].to_vec()
        };
        let mut rows = Vec::with_capacity(lay.len * dims);
        for _ in 0..lay.len {
            for &b in &base {
                let jitter: f64 = rng.sample(StandardNormal);
                rows.push((b + spec.cluster_spread * jitter) as f32);
            }
        }
        let observations = (0..lay.len)
            .map(|s| FrameObservation::new(lay.start + s as u64, lane_box(t, s)))
            .collect();
        let label = if cat < spec.n_known_categories {
            TrackLabel::Known(names[cat].clone())
        } else {
            TrackLabel::Unknown
        };
        let annotation = if tracking_error[t] {
            Annotation::TrackingError
        } else {
            Annotation::Category(names[cat].clone())
        };
        let track = Track {
            id: TrackId(t as u64),
            tracklet_ids: vec![TrackletId(t as u64)],
            observations,
            label,
            junctions: Vec::new(),
        };
        (AnnotatedTrack { track, annotation }, rows, lay.len)
    };

    #[cfg(feature = "parallel")]
    let generated: Vec<(AnnotatedTrack, Vec<f32>, usize)> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(make).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let generated: Vec<(AnnotatedTrack, Vec<f32>, usize)> = (0..n).map(make).collect();

    let total_rows: usize = generated.iter().map(|g| g.2).sum();
    let mut data = Vec::with_capacity(total_rows * dims);
    let mut row_ids = Vec::with_capacity(total_rows);
    let mut tracks = Vec::with_capacity(n);
    for (t, (track, rows, count)) in generated.into_iter().enumerate() {
        data.extend(rows);
        row_ids.extend((0..count).map(|c| format!("{t}#{c}")));
        tracks.push(track);
    }
    let crops = EmbeddingMatrix::new(total_rows, dims, data, row_ids)?;
    Ok(SyntheticCollection {
        tracks,
        crops,
        truth: SyntheticTruth {
            category_names: names,
            category,
            outlier,
            tracking_error,
            centers,
            category_sizes: sizes,
        },
    })
}
