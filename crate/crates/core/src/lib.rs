//! Object discovery from mined tracks.
//!
//! The crate covers the algorithmic half of the pipeline: merging per-frame
//! selected tracklets into tracks by mask overlap, reducing each track to one
//! representative embedding, clustering those embeddings with KMeans or
//! HDBSCAN, and scoring the result with adjusted mutual information as a
//! function of the fraction of excluded outliers.
//!
//! The crate is `no_std` with `alloc`. The default `std` feature only turns on
//! the standard-library backends of its dependencies; `parallel` adds rayon
//! for the distance-heavy loops. Results never depend on either feature.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cluster;
pub mod embedding;
pub mod eval;
pub mod merge;
pub mod model;
pub mod synthetic;

mod math;
mod seed;

pub use cluster::{ClusteringResult, NOISE};
pub use model::{
    AnnotatedTrack, Annotation, BoundingBox, EmbeddingMatrix, FrameObservation, MaskGeometry,
    RleMask, Track, TrackId, TrackLabel, Tracklet, TrackletId,
};
