//! On-disk formats. Every writer's output is accepted by the matching reader.

pub mod annotations;
pub mod clusters;
pub mod curve;
pub mod emb;
pub mod jsonl;
pub mod sidecar;

pub use annotations::{format_annotation, parse_annotation, read_annotations, write_annotations};
pub use clusters::{meta_path, read_clusters, write_clusters, ClusterMeta, ClusterTable};
pub use curve::{read_curve, render_curve, write_curve};
pub use emb::{parse_embeddings, read_embeddings, write_embeddings};
pub use jsonl::{
    read_timeline, read_tracklets, read_tracks, timeline_from, write_timeline, write_tracklets, write_tracks,
    LineError, Parsed, ReadMode, TrackRecord, TrackletRecord,
};
pub use sidecar::{read_json, read_pca, read_truth, write_json, write_pca, write_truth, TruthFile};
