//! Tracklet overlap and progressive merging of selected tracklets into tracks.

mod compression;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{
    mask_iou, FrameObservation, Junction, Track, TrackId, TrackLabel, Tracklet, TrackletId,
};

pub use compression::{compression_report, CompressionInput, CompressionStats};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MergeError {
    #[error("threshold {name} = {value} outside (0, 1]")]
    InvalidThreshold { name: &'static str, value: f64 },
    #[error("tracklet id {0} appears more than once")]
    DuplicateTracklet(TrackletId),
    #[error("timeline frame {frame} selects unknown tracklet {id}")]
    UnknownTracklet { frame: u64, id: TrackletId },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MergeConfig {
    /// Per-frame mask IoU a pair must exceed to count as matching.
    pub gamma: f64,
    /// Smallest overlap ratio that lets one tracklet continue another's track.
    pub lambda_min: f64,
}

impl MergeConfig {
    pub fn new(gamma: f64, lambda_min: f64) -> Result<Self, MergeError> {
        for (name, value) in [("gamma", gamma), ("lambda_min", lambda_min)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(MergeError::InvalidThreshold { name, value });
            }
        }
        Ok(Self { gamma, lambda_min })
    }
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            lambda_min: 0.5,
        }
    }
}

/// Tracklets indexed by id.
#[derive(Debug, Clone, Default)]
pub struct TrackletStore {
    by_id: BTreeMap<TrackletId, Tracklet>,
}

impl TrackletStore {
    pub fn new(tracklets: Vec<Tracklet>) -> Result<Self, MergeError> {
        let mut by_id = BTreeMap::new();
        for t in tracklets {
            let id = t.id;
            if by_id.insert(id, t).is_some() {
                return Err(MergeError::DuplicateTracklet(id));
            }
        }
        Ok(Self { by_id })
    }

    pub fn get(&self, id: TrackletId) -> Option<&Tracklet> {
        self.by_id.get(&id)
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tracklet> {
        self.by_id.values()
    }
}

/// Per-frame set of selected tracklets. Frames missing from the map select nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionTimeline {
    frames: BTreeMap<u64, Vec<TrackletId>>,
}

impl SelectionTimeline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn select(&mut self, frame: u64, id: TrackletId) {
        let ids = self.frames.entry(frame).or_default();
        if let Err(pos) = ids.binary_search(&id) {
            ids.insert(pos, id);
        }
    }

    pub fn set_frame(&mut self, frame: u64, mut ids: Vec<TrackletId>) {
        ids.sort_unstable();
        ids.dedup();
        self.frames.insert(frame, ids);
    }

    /// Frames in ascending order with their sorted selections.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &[TrackletId])> {
        self.frames.iter().map(|(f, ids)| (*f, ids.as_slice()))
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// Mean number of selected tracklets over the listed frames.
    pub fn mean_selected(&self) -> f64 {
        if self.frames.is_empty() {
            return 0.0;
        }
        let total: usize = self.frames.values().map(Vec::len).sum();
        total as f64 / self.frames.len() as f64
    }

    pub fn check_against(&self, store: &TrackletStore) -> Result<(), MergeError> {
        for (frame, ids) in self.iter() {
            if let Some(&id) = ids.iter().find(|id| store.get(**id).is_none()) {
                return Err(MergeError::UnknownTracklet { frame, id });
            }
        }
        Ok(())
    }
}

/// Fraction of frames on which two tracklets carry matching masks, relative to
/// the shorter tracklet.
///
/// Only frames observed by both tracklets can match; a frame matches when the
/// mask IoU is strictly above `gamma`. Masks on differing canvases never match.
pub fn overlap_ratio(a: &Tracklet, b: &Tracklet, gamma: f64) -> f64 {
    let shorter = a.len().min(b.len());
    if shorter == 0 {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let mut matches = 0usize;
    while i < a.observations.len() && j < b.observations.len() {
        let (oa, ob) = (&a.observations[i], &b.observations[j]);
        match oa.frame.cmp(&ob.frame) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                if mask_iou(&oa.geometry, &ob.geometry).is_ok_and(|v| v > gamma) {
                    matches += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    matches as f64 / shorter as f64
}

struct Chain {
    /// (tracklet, first frame it owns); the first entry owns everything before
    /// the second one's hand-over frame.
    links: Vec<(TrackletId, u64)>,
    junctions: Vec<Junction>,
}

/// Merges per-frame selected tracklets into tracks in one forward pass.
///
/// At each timeline frame a track whose tracklet is selected again simply
/// continues. A track whose tracklet is not selected may be continued by a
/// tracklet selected for the first time in that frame: every such pair with
/// overlap ratio at least `lambda_min` is a candidate, and pairs are accepted
/// greedily by descending ratio (then lower candidate id, then lower current
/// tracklet id), each track and candidate at most once. Unmatched tracks end;
/// unmatched new tracklets open new tracks. A frame with no selection ends
/// every open track. Re-selections of tracklets already used by an ended
/// track are ignored.
pub fn merge_tracklets(
    store: &TrackletStore,
    timeline: &SelectionTimeline,
    cfg: &MergeConfig,
) -> Result<Vec<Track>, MergeError> {
    timeline.check_against(store)?;

    let mut chains: Vec<Chain> = Vec::new();
    // open track index, keyed by its current tracklet
    let mut open: BTreeMap<TrackletId, usize> = BTreeMap::new();
    let mut consumed: BTreeSet<TrackletId> = BTreeSet::new();
    let mut prev_frame: Option<u64> = None;

    for (frame, selected) in timeline.iter() {
        if prev_frame.is_some_and(|p| frame > p + 1) {
            open.clear();
        }
        prev_frame = Some(frame);
        if selected.is_empty() {
            open.clear();
            continue;
        }

        let orphans: Vec<(TrackletId, usize)> = open
            .iter()
            .filter(|(id, _)| selected.binary_search(id).is_err())
            .map(|(id, idx)| (*id, *idx))
            .collect();
        let candidates: Vec<TrackletId> = selected
            .iter()
            .copied()
            .filter(|id| !consumed.contains(id))
            .collect();

        let mut pairs = scored_pairs(store, &orphans, &candidates, cfg);
        pairs.sort_by(|x, y| {
            y.lambda
                .total_cmp(&x.lambda)
                .then(x.candidate.cmp(&y.candidate))
                .then(x.orphan.cmp(&y.orphan))
        });

        let mut taken: BTreeSet<TrackletId> = BTreeSet::new();
        let mut continued: BTreeSet<TrackletId> = BTreeSet::new();
        for p in &pairs {
            if taken.contains(&p.candidate) || continued.contains(&p.orphan) {
                continue;
            }
            taken.insert(p.candidate);
            continued.insert(p.orphan);
            let idx = open.remove(&p.orphan).expect("orphan is open");
            let chain = &mut chains[idx];
            chain.junctions.push(Junction {
                frame,
                from: p.orphan,
                to: p.candidate,
                lambda: p.lambda,
            });
            chain.links.push((p.candidate, frame));
            open.insert(p.candidate, idx);
            consumed.insert(p.candidate);
        }
        for (id, _) in &orphans {
            if !continued.contains(id) {
                open.remove(id);
            }
        }
        for &c in &candidates {
            if taken.contains(&c) {
                continue;
            }
            consumed.insert(c);
            open.insert(c, chains.len());
            chains.push(Chain {
                links: alloc::vec![(c, 0)],
                junctions: Vec::new(),
            });
        }
    }

    Ok(chains
        .into_iter()
        .enumerate()
        .map(|(i, chain)| build_track(store, TrackId(i as u64), chain))
        .collect())
}

struct ScoredPair {
    orphan: TrackletId,
    candidate: TrackletId,
    lambda: f64,
}

fn scored_pairs(
    store: &TrackletStore,
    orphans: &[(TrackletId, usize)],
    candidates: &[TrackletId],
    cfg: &MergeConfig,
) -> Vec<ScoredPair> {
    let jobs: Vec<(TrackletId, TrackletId)> = orphans
        .iter()
        .flat_map(|(o, _)| candidates.iter().map(move |c| (*o, *c)))
        .collect();
    let score = |&(o, c): &(TrackletId, TrackletId)| {
        let lambda = overlap_ratio(
            store.get(o).expect("validated"),
            store.get(c).expect("validated"),
            cfg.gamma,
        );
        (lambda >= cfg.lambda_min).then_some(ScoredPair {
            orphan: o,
            candidate: c,
            lambda,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if jobs.len() > 64 {
            return jobs.par_iter().filter_map(score).collect();
        }
    }
    jobs.iter().filter_map(score).collect()
}

fn build_track(store: &TrackletStore, id: TrackId, chain: Chain) -> Track {
    let mut observations: Vec<FrameObservation> = Vec::new();
    let mut label_weight: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, &(tid, from)) in chain.links.iter().enumerate() {
        let t = store.get(tid).expect("validated");
        let until = chain.links.get(k + 1).map(|l| l.1);
        let owned = t
            .observations
            .iter()
            .filter(|o| (k == 0 || o.frame >= from) && until.map_or(true, |u| o.frame < u));
        observations.extend(owned.cloned());
        if let Some(label) = &t.classifier_label {
            *label_weight.entry(label.as_str()).or_default() += t.len();
        }
    }
    // Most-observed classifier label; BTreeMap order resolves ties by name.
    let label = label_weight
        .iter()
        .fold(None::<(&str, usize)>, |best, (&name, &w)| match best {
            Some((_, bw)) if bw >= w => best,
            _ => Some((name, w)),
        })
        .map_or(TrackLabel::Unknown, |(name, _)| TrackLabel::Known(String::from(name)));
    Track {
        id,
        tracklet_ids: chain.links.iter().map(|l| l.0).collect(),
        observations,
        label,
        junctions: chain.junctions,
    }
}
