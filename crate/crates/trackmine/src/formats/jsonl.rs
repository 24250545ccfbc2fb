//! JSON-lines files for tracklets, tracks and the selection timeline.
//!
//! Geometry is written as `{"rle": {"w", "h", "runs"}}` or
//! `{"box": [x, y, w, h]}`. Fields a record does not know about are kept and
//! written back unchanged.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use trackmine_core::merge::SelectionTimeline;
use trackmine_core::model::{validate_tracklet, Junction};
use trackmine_core::{BoundingBox, FrameObservation, MaskGeometry, RleMask, Track, TrackId, TrackLabel, Tracklet, TrackletId};

use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// Stop at the first bad line.
    #[default]
    Strict,
    /// Skip bad lines and report them.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    /// Always empty in strict mode.
    pub errors: Vec<LineError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GeometryRepr {
    Rle(RleRepr),
    Box([f64; 4]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RleRepr {
    w: u32,
    h: u32,
    runs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ObservationRepr {
    frame: u64,
    geometry: GeometryRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

impl From<&FrameObservation> for ObservationRepr {
    fn from(o: &FrameObservation) -> Self {
        let geometry = match &o.geometry {
            MaskGeometry::Rle(m) => GeometryRepr::Rle(RleRepr {
                w: m.width,
                h: m.height,
                runs: m.runs.clone(),
            }),
            MaskGeometry::Box(b) => GeometryRepr::Box([b.x, b.y, b.w, b.h]),
        };
        Self {
            frame: o.frame,
            geometry,
            score: o.proposal_score,
        }
    }
}

impl From<ObservationRepr> for FrameObservation {
    fn from(o: ObservationRepr) -> Self {
        let geometry = match o.geometry {
            GeometryRepr::Rle(r) => MaskGeometry::Rle(RleMask::new(r.w, r.h, r.runs)),
            GeometryRepr::Box([x, y, w, h]) => MaskGeometry::Box(BoundingBox::new(x, y, w, h)),
        };
        Self {
            frame: o.frame,
            geometry,
            proposal_score: o.score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TrackletRepr {
    id: u64,
    #[serde(default)]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    observations: Vec<ObservationRepr>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct JunctionRepr {
    frame: u64,
    from: u64,
    to: u64,
    lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TrackRepr {
    id: u64,
    #[serde(default)]
    label: Option<String>,
    tracklet_ids: Vec<u64>,
    observations: Vec<ObservationRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    junctions: Vec<JunctionRepr>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FrameRepr {
    frame: u64,
    selected: Vec<u64>,
}

/// A tracklet plus any fields of its line this crate does not interpret.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackletRecord {
    pub tracklet: Tracklet,
    pub extra: Map<String, Value>,
}

impl From<Tracklet> for TrackletRecord {
    fn from(tracklet: Tracklet) -> Self {
        Self {
            tracklet,
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub track: Track,
    pub extra: Map<String, Value>,
}

impl From<Track> for TrackRecord {
    fn from(track: Track) -> Self {
        Self {
            track,
            extra: Map::new(),
        }
    }
}

fn check_observations(id: u64, observations: Vec<FrameObservation>) -> Result<Vec<FrameObservation>, String> {
    let probe = Tracklet::new(TrackletId(id), observations);
    let report = validate_tracklet(&probe);
    if report.is_valid() {
        Ok(probe.observations)
    } else {
        let reasons: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        Err(format!("record {id}: {}", reasons.join("; ")))
    }
}

fn tracklet_from(r: TrackletRepr) -> Result<TrackletRecord, String> {
    let observations = check_observations(r.id, r.observations.into_iter().map(Into::into).collect())?;
    if r.confidence.is_some_and(|c| !(0.0..=1.0).contains(&c)) {
        return Err(format!("record {}: confidence outside [0,1]", r.id));
    }
    Ok(TrackletRecord {
        tracklet: Tracklet {
            id: TrackletId(r.id),
            observations,
            classifier_label: r.label,
            classifier_confidence: r.confidence,
        },
        extra: r.extra,
    })
}

fn track_from(r: TrackRepr) -> Result<TrackRecord, String> {
    let observations = check_observations(r.id, r.observations.into_iter().map(Into::into).collect())?;
    if !r.junctions.is_empty() && r.junctions.len() + 1 != r.tracklet_ids.len() {
        return Err(format!(
            "record {}: {} junctions for {} tracklets",
            r.id,
            r.junctions.len(),
            r.tracklet_ids.len()
        ));
    }
    Ok(TrackRecord {
        track: Track {
            id: TrackId(r.id),
            tracklet_ids: r.tracklet_ids.into_iter().map(TrackletId).collect(),
            observations,
            label: r.label.map_or(TrackLabel::Unknown, TrackLabel::Known),
            junctions: r
                .junctions
                .into_iter()
                .map(|j| Junction {
                    frame: j.frame,
                    from: TrackletId(j.from),
                    to: TrackletId(j.to),
                    lambda: j.lambda,
                })
                .collect(),
        },
        extra: r.extra,
    })
}

fn read_lines<R, T>(
    path: &Path,
    mode: ReadMode,
    mut convert: impl FnMut(R) -> Result<T, String>,
) -> Result<Parsed<T>>
where
    R: DeserializeOwned,
{
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut parsed = Parsed {
        records: Vec::new(),
        errors: Vec::new(),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let outcome = serde_json::from_str::<R>(&line)
            .map_err(|e| e.to_string())
            .and_then(&mut convert);
        match outcome {
            Ok(rec) => parsed.records.push(rec),
            Err(message) => match mode {
                ReadMode::Strict => return Err(Error::data(path, Some(Location::Line(line_no)), message)),
                ReadMode::Lenient => parsed.errors.push(LineError { line: line_no, message }),
            },
        }
    }
    Ok(parsed)
}

/// Rejects a second record with an id already seen.
fn unique<T>(key: impl Fn(&T) -> u64) -> impl FnMut(T) -> Result<T, String> {
    let mut seen = BTreeSet::new();
    move |rec| {
        let id = key(&rec);
        if seen.insert(id) {
            Ok(rec)
        } else {
            Err(format!("duplicate id {id}"))
        }
    }
}

pub fn read_tracklets(path: &Path, mode: ReadMode) -> Result<Parsed<TrackletRecord>> {
    let mut dedup = unique(|r: &TrackletRecord| r.tracklet.id.0);
    read_lines(path, mode, |r: TrackletRepr| tracklet_from(r).and_then(&mut dedup))
}

pub fn read_tracks(path: &Path, mode: ReadMode) -> Result<Parsed<TrackRecord>> {
    let mut dedup = unique(|r: &TrackRecord| r.track.id.0);
    read_lines(path, mode, |r: TrackRepr| track_from(r).and_then(&mut dedup))
}

/// Frames may appear in any order but only once.
pub fn read_timeline(path: &Path, mode: ReadMode) -> Result<Parsed<(u64, Vec<TrackletId>)>> {
    let mut dedup = unique(|r: &FrameRepr| r.frame);
    let parsed = read_lines(path, mode, |r: FrameRepr| dedup(r))?;
    Ok(Parsed {
        records: parsed
            .records
            .into_iter()
            .map(|r| (r.frame, r.selected.into_iter().map(TrackletId).collect()))
            .collect(),
        errors: parsed.errors,
    })
}

pub fn timeline_from(frames: Vec<(u64, Vec<TrackletId>)>) -> SelectionTimeline {
    let mut tl = SelectionTimeline::new();
    for (frame, ids) in frames {
        tl.set_frame(frame, ids);
    }
    tl
}

fn write_lines<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(|e| Error::io(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_tracklets<'a>(path: &Path, records: impl IntoIterator<Item = &'a TrackletRecord>) -> Result<()> {
    write_lines(
        path,
        records.into_iter().map(|r| TrackletRepr {
            id: r.tracklet.id.0,
            label: r.tracklet.classifier_label.clone(),
            confidence: r.tracklet.classifier_confidence,
            observations: r.tracklet.observations.iter().map(Into::into).collect(),
            extra: r.extra.clone(),
        }),
    )
}

pub fn write_tracks<'a>(path: &Path, records: impl IntoIterator<Item = &'a TrackRecord>) -> Result<()> {
    write_lines(
        path,
        records.into_iter().map(|r| {
            let t = &r.track;
            TrackRepr {
                id: t.id.0,
                label: match &t.label {
                    TrackLabel::Known(name) => Some(name.clone()),
                    TrackLabel::Unknown => None,
                },
                tracklet_ids: t.tracklet_ids.iter().map(|i| i.0).collect(),
                observations: t.observations.iter().map(Into::into).collect(),
                junctions: t
                    .junctions
                    .iter()
                    .map(|j| JunctionRepr {
                        frame: j.frame,
                        from: j.from.0,
                        to: j.to.0,
                        lambda: j.lambda,
                    })
                    .collect(),
                extra: r.extra.clone(),
            }
        }),
    )
}

pub fn write_timeline(path: &Path, timeline: &SelectionTimeline) -> Result<()> {
    write_lines(
        path,
        timeline.iter().map(|(frame, ids)| FrameRepr {
            frame,
            selected: ids.iter().map(|i| i.0).collect(),
        }),
    )
}
