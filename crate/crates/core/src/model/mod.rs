//! Domain types shared by every stage of the pipeline.

mod geometry;
mod matrix;
mod track;
mod validate;

pub use geometry::{mask_iou, BoundingBox, GeometryError, MaskGeometry, RleMask};
pub use matrix::{EmbeddingError, EmbeddingMatrix};
pub use track::{
    AnnotatedTrack, Annotation, FrameObservation, Junction, Track, TrackId, TrackLabel, Tracklet,
    TrackletId,
};
pub use validate::{validate_tracklet, ValidationReport, Violation};
