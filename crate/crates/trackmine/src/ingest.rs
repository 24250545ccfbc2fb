//! Loading a dataset directory and checking it for consistency.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use trackmine_core::embedding::crop_track_key;
use trackmine_core::{Annotation, EmbeddingMatrix, TrackletId};

use crate::error::{Error, Result};
use crate::formats::{
    read_annotations, read_embeddings, read_timeline, read_tracklets, read_tracks, LineError, ReadMode, TrackRecord,
    TrackletRecord,
};

/// Everything found in a dataset directory. Missing files are `None`.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub tracks: Option<Vec<TrackRecord>>,
    pub tracklets: Option<Vec<TrackletRecord>>,
    pub timeline: Option<Vec<(u64, Vec<TrackletId>)>>,
    pub annotations: Option<Vec<(String, Annotation)>>,
    /// Embedding files by file name.
    pub embeddings: Vec<(String, EmbeddingMatrix)>,
    pub files: Vec<String>,
    pub problems: Vec<FileProblem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileProblem {
    pub file: String,
    pub line: Option<u64>,
    pub message: String,
}

/// Turns a directory in some on-disk layout into a [`Dataset`]. Bad lines
/// and unreadable files become problems rather than errors.
pub trait Adapter {
    fn name(&self) -> &'static str;
    fn load(&self, dir: &Path) -> Result<Dataset>;
}

/// This crate's own layout: `tracks.jsonl`, `tracklets.jsonl`,
/// `timeline.jsonl`, `annotations.csv` and any number of `*.emb` files.
#[derive(Debug, Clone, Copy, Default)]
pub struct NativeAdapter;

impl NativeAdapter {
    fn jsonl<T>(
        dir: &Path,
        name: &str,
        ds: &mut Dataset,
        read: impl Fn(&Path, ReadMode) -> Result<crate::formats::Parsed<T>>,
    ) -> Option<Vec<T>> {
        let path = dir.join(name);
        if !path.is_file() {
            return None;
        }
        ds.files.push(name.to_string());
        match read(&path, ReadMode::Lenient) {
            Ok(parsed) => {
                ds.problems.extend(parsed.errors.into_iter().map(|LineError { line, message }| FileProblem {
                    file: name.to_string(),
                    line: Some(line),
                    message,
                }));
                Some(parsed.records)
            }
            Err(e) => {
                ds.problems.push(problem(name, e));
                None
            }
        }
    }
}

fn problem(file: &str, e: Error) -> FileProblem {
    let line = match &e {
        Error::Data {
            at: Some(crate::error::Location::Line(l)),
            ..
        } => Some(*l),
        _ => None,
    };
    FileProblem {
        file: file.to_string(),
        line,
        message: e.to_string(),
    }
}

impl Adapter for NativeAdapter {
    fn name(&self) -> &'static str {
        "native"
    }

    fn load(&self, dir: &Path) -> Result<Dataset> {
        if !dir.is_dir() {
            return Err(Error::Usage(format!("{} is not a directory", dir.display())));
        }
        let mut ds = Dataset::default();
        ds.tracks = Self::jsonl(dir, "tracks.jsonl", &mut ds, read_tracks);
        ds.tracklets = Self::jsonl(dir, "tracklets.jsonl", &mut ds, read_tracklets);
        ds.timeline = Self::jsonl(dir, "timeline.jsonl", &mut ds, read_timeline);

        let ann = dir.join("annotations.csv");
        if ann.is_file() {
            ds.files.push("annotations.csv".into());
            match read_annotations(&ann) {
                Ok(a) => ds.annotations = Some(a),
                Err(e) => ds.problems.push(problem("annotations.csv", e)),
            }
        }

        let mut emb: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "emb"))
            .collect();
        emb.sort();
        for p in emb {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            ds.files.push(name.clone());
            match read_embeddings(&p) {
                Ok(m) => ds.embeddings.push((name, m)),
                Err(e) => ds.problems.push(problem(&name, e)),
            }
        }
        Ok(ds)
    }
}

/// A reference from one file to a record missing from another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingRef {
    pub file: String,
    pub id: String,
    pub missing_from: String,
}

/// Table-1 style statistics of a dataset directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub adapter: String,
    pub files: Vec<String>,
    /// Distinct frames seen by tracks, or by the timeline without tracks.
    pub frames: Option<usize>,
    pub tracklets: Option<usize>,
    /// Tracks in the track file, or annotated tracks without one.
    pub tracks_total: usize,
    /// Tracks carrying any annotation.
    pub tracks_labeled: usize,
    pub categorized: usize,
    pub categories: usize,
    pub unknown: usize,
    pub tracking_errors: usize,
    /// Tracking errors over labeled tracks.
    pub error_rate: Option<f64>,
    pub embedding_rows: Vec<(String, usize)>,
    pub dangling: Vec<DanglingRef>,
    pub problems: Vec<FileProblem>,
}

impl IngestReport {
    pub fn is_clean(&self) -> bool {
        self.dangling.is_empty() && self.problems.is_empty()
    }

    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |n| n.to_string());
        let errors = match self.error_rate {
            Some(r) => format!("{} ({:.1}%)", self.tracking_errors, 100.0 * r),
            None => self.tracking_errors.to_string(),
        };
        let rows = [
            ("Frames", opt(self.frames)),
            ("Tracklets", opt(self.tracklets)),
            ("Tracks (total)", self.tracks_total.to_string()),
            ("Tracks (labeled)", self.tracks_labeled.to_string()),
            ("Categorized", self.categorized.to_string()),
            ("Categories", self.categories.to_string()),
            ("Unknown objects", self.unknown.to_string()),
            ("Tracking errors", errors),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<18}{v:>12}");
        }
        for (name, n) in &self.embedding_rows {
            let _ = writeln!(s, "{:<18}{n:>12}", format!("Rows in {name}"));
        }
        if !self.dangling.is_empty() {
            let _ = writeln!(s, "\n{} dangling references", self.dangling.len());
            for d in self.dangling.iter().take(20) {
                let _ = writeln!(s, "  {}: {} not in {}", d.file, d.id, d.missing_from);
            }
        }
        if !self.problems.is_empty() {
            let _ = writeln!(s, "\n{} unreadable records", self.problems.len());
            for p in self.problems.iter().take(20) {
                let _ = writeln!(s, "  {}", p.message);
            }
        }
        s
    }
}

pub fn ingest_validate(dir: &Path) -> Result<IngestReport> {
    ingest_validate_with(dir, &NativeAdapter)
}

pub fn ingest_validate_with(dir: &Path, adapter: &dyn Adapter) -> Result<IngestReport> {
    let ds = adapter.load(dir)?;
    Ok(summarize_dataset(adapter.name(), ds))
}

pub fn summarize_dataset(adapter: &str, ds: Dataset) -> IngestReport {
    let mut dangling = Vec::new();
    let mut dangle = |file: &str, id: String, missing_from: &str| {
        dangling.push(DanglingRef {
            file: file.to_string(),
            id,
            missing_from: missing_from.to_string(),
        })
    };

    let track_ids: Option<BTreeSet<String>> = ds
        .tracks
        .as_ref()
        .map(|ts| ts.iter().map(|t| t.track.id.0.to_string()).collect());
    let tracklet_ids: Option<BTreeSet<u64>> = ds
        .tracklets
        .as_ref()
        .map(|ts| ts.iter().map(|t| t.tracklet.id.0).collect());

    if let (Some(tracks), Some(known)) = (&ds.tracks, &tracklet_ids) {
        for t in tracks {
            for id in &t.track.tracklet_ids {
                if !known.contains(&id.0) {
                    dangle("tracks.jsonl", format!("tracklet {id} of track {}", t.track.id), "tracklets.jsonl");
                }
            }
        }
    }
    if let (Some(timeline), Some(known)) = (&ds.timeline, &tracklet_ids) {
        let missing: BTreeSet<u64> = timeline
            .iter()
            .flat_map(|(_, ids)| ids.iter().map(|i| i.0))
            .filter(|i| !known.contains(i))
            .collect();
        for id in missing {
            dangle("timeline.jsonl", format!("tracklet {id}"), "tracklets.jsonl");
        }
    }
    if let (Some(ann), Some(known)) = (&ds.annotations, &track_ids) {
        for (id, _) in ann {
            if !known.contains(id) {
                dangle("annotations.csv", format!("track {id}"), "tracks.jsonl");
            }
        }
    }
    if let Some(known) = &track_ids {
        for (name, m) in &ds.embeddings {
            let missing: BTreeSet<&str> = m
                .row_ids()
                .iter()
                .map(|id| crop_track_key(id))
                .filter(|k| !known.contains(*k))
                .collect();
            for k in missing {
                dangle(name, format!("track {k}"), "tracks.jsonl");
            }
        }
    }

    let frames = if let Some(tracks) = &ds.tracks {
        let f: BTreeSet<u64> = tracks.iter().flat_map(|t| t.track.observations.iter().map(|o| o.frame)).collect();
        Some(f.len())
    } else {
        ds.timeline.as_ref().map(|tl| tl.iter().filter(|(_, ids)| !ids.is_empty()).count())
    };

    let ann = ds.annotations.as_deref().unwrap_or(&[]);
    let mut categories = BTreeSet::new();
    let (mut categorized, mut unknown, mut tracking_errors) = (0, 0, 0);
    for (_, a) in ann {
        match a {
            Annotation::Category(c) => {
                categorized += 1;
                categories.insert(c.as_str());
            }
            Annotation::UnknownValid => unknown += 1,
            Annotation::TrackingError => tracking_errors += 1,
        }
    }
    IngestReport {
        adapter: adapter.to_string(),
        files: ds.files,
        frames,
        tracklets: ds.tracklets.as_ref().map(Vec::len),
        tracks_total: ds.tracks.as_ref().map_or(ann.len(), Vec::len),
        tracks_labeled: ann.len(),
        categorized,
        categories: categories.len(),
        unknown,
        tracking_errors,
        error_rate: (!ann.is_empty()).then(|| tracking_errors as f64 / ann.len() as f64),
        embedding_rows: ds.embeddings.iter().map(|(n, m)| (n.clone(), m.rows())).collect(),
        dangling,
        problems: ds.problems,
    }
}
