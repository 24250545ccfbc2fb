#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use trackmine_core::cluster::PointSet;
use trackmine_core::merge::{SelectionTimeline, TrackletStore};
use trackmine_core::{BoundingBox, EmbeddingMatrix, FrameObservation, MaskGeometry, RleMask, Tracklet, TrackletId};
use trackmine_testkit::geometry::Geom;
use trackmine_testkit::merge::OTracklet;

pub fn geometry(g: &Geom) -> MaskGeometry {
    match g {
        Geom::Rle { w, h, runs } => MaskGeometry::Rle(RleMask::new(*w, *h, runs.clone())),
        Geom::Box { x, y, w, h } => MaskGeometry::Box(BoundingBox::new(*x, *y, *w, *h)),
    }
}

pub fn tracklet(t: &OTracklet) -> Tracklet {
    Tracklet::new(
        TrackletId(t.id),
        t.frames
            .iter()
            .map(|(f, g)| FrameObservation::new(*f, geometry(g)))
            .collect(),
    )
}

pub fn store_and_timeline(
    tracklets: &[OTracklet],
    timeline: &BTreeMap<u64, BTreeSet<u64>>,
) -> (TrackletStore, SelectionTimeline) {
    let store = TrackletStore::new(tracklets.iter().map(tracklet).collect()).unwrap();
    let mut tl = SelectionTimeline::new();
    for (&f, ids) in timeline {
        tl.set_frame(f, ids.iter().map(|&i| TrackletId(i)).collect());
    }
    (store, tl)
}

pub fn point_set(points: &[Vec<f64>]) -> PointSet {
    let dims = points.first().map_or(0, Vec::len);
    PointSet::new(points.len(), dims, points.concat()).unwrap()
}

pub fn matrix(points: &[Vec<f64>]) -> EmbeddingMatrix {
    let rows: Vec<Vec<f32>> = points.iter().map(|p| p.iter().map(|&v| v as f32).collect()).collect();
    EmbeddingMatrix::from_rows(&rows).unwrap()
}

/// Partition as a sorted list of sorted member lists; noise is dropped.
pub fn partition<L: Copy + Ord + Into<i64>>(labels: &[L]) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        let l: i64 = l.into();
        if l >= 0 {
            groups.entry(l).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

pub fn noise_set<L: Copy + Into<i64>>(labels: &[L]) -> Vec<usize> {
    labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l.into() < 0)
        .map(|(i, _)| i)
        .collect()
}
