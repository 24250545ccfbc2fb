use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::geometry::MaskGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct TrackletId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct TrackId(pub u64);

impl fmt::Display for TrackletId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameObservation {
    pub frame: u64,
    pub geometry: MaskGeometry,
    pub proposal_score: Option<f64>,
}

impl FrameObservation {
    pub fn new(frame: u64, geometry: MaskGeometry) -> Self {
        Self {
            frame,
            geometry,
            proposal_score: None,
        }
    }
}

/// A fragment of an object trajectory as produced by per-frame selection.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tracklet {
    pub id: TrackletId,
    /// Sorted strictly ascending by frame.
    pub observations: Vec<FrameObservation>,
    pub classifier_label: Option<String>,
    pub classifier_confidence: Option<f64>,
}

impl Tracklet {
    pub fn new(id: TrackletId, observations: Vec<FrameObservation>) -> Self {
        Self {
            id,
            observations,
            classifier_label: None,
            classifier_confidence: None,
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn first_frame(&self) -> Option<u64> {
        self.observations.first().map(|o| o.frame)
    }

    pub fn last_frame(&self) -> Option<u64> {
        self.observations.last().map(|o| o.frame)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TrackLabel {
    Known(String),
    Unknown,
}

/// Hand-over point between two consecutive tracklets of a track.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Junction {
    /// First frame at which `to` carries the track.
    pub frame: u64,
    pub from: TrackletId,
    pub to: TrackletId,
    /// Overlap ratio of the pair at merge time.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Track {
    pub id: TrackId,
    pub tracklet_ids: Vec<TrackletId>,
    pub observations: Vec<FrameObservation>,
    pub label: TrackLabel,
    /// One entry per consecutive tracklet pair, `tracklet_ids.len() - 1` in total.
    pub junctions: Vec<Junction>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Manual annotation of a track, used only for evaluation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Annotation {
    Category(String),
    UnknownValid,
    TrackingError,
}

impl Annotation {
    pub fn category(&self) -> Option<&str> {
        match self {
            Annotation::Category(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnotatedTrack {
    pub track: Track,
    pub annotation: Annotation,
}
