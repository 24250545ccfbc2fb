//! Fragmentation of synthetic tracks into tracklets plus the per-frame
//! selection timeline a tracker would have produced.

use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{lane_box, layout, track_rng, SyntheticError, SyntheticSpec};
use crate::merge::SelectionTimeline;
use crate::model::{FrameObservation, Track, TrackId, TrackLabel, Tracklet, TrackletId};
use crate::seed::derive_seed;

/// How consecutive tracklets of one track overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JunctionStyle {
    /// Each tracklet keeps observing its object for 1.5x its selected span
    /// after hand-over, which puts every junction's overlap ratio at 0.6 or more.
    #[default]
    Overlapping,
    /// Tracklets observe only their own selected span; overlap ratio 0.
    Disjoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackletStream {
    pub tracklets: Vec<Tracklet>,
    pub timeline: SelectionTimeline,
    /// Source track of each tracklet, aligned with `tracklets`.
    pub truth_track: Vec<TrackId>,
    pub n_tracks: usize,
}

/// Splits `track` before each observation index in `cuts` (strictly inside
/// the track, ascending) and returns every piece with the frames it is
/// selected for. Tracklet ids start at `first_id`.
pub fn fragment_track(
    track: &Track,
    cuts: &[usize],
    style: JunctionStyle,
    first_id: u64,
) -> Vec<(Tracklet, Range<u64>)> {
    let obs = &track.observations;
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0);
    bounds.extend(cuts.iter().copied().filter(|&c| c > 0 && c < obs.len()));
    bounds.push(obs.len());
    bounds.dedup();
    let label = match &track.label {
        TrackLabel::Known(name) => Some(name.clone()),
        TrackLabel::Unknown => None,
    };
    bounds
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let (from, to) = (w[0], w[1]);
            let seen_until = match style {
                JunctionStyle::Disjoint => to,
                JunctionStyle::Overlapping => {
                    let extra = (3 * (to - from)).div_ceil(2);
                    (to + extra).min(obs.len())
                }
            };
            let mut t = Tracklet::new(TrackletId(first_id + k as u64), obs[from..seen_until].to_vec());
            t.classifier_label = label.clone();
            t.classifier_confidence = label.as_ref().map(|_| 0.9);
            let selected = obs[from].frame..obs[to - 1].frame + 1;
            (t, selected)
        })
        .collect()
}

pub fn generate_tracklet_stream(spec: &SyntheticSpec, fragmentation_rate: f64) -> Result<TrackletStream, SyntheticError> {
    generate_tracklet_stream_with(spec, fragmentation_rate, JunctionStyle::Overlapping)
}

/// Cuts every interior frame boundary of every track independently with
/// probability `fragmentation_rate`.
pub fn generate_tracklet_stream_with(
    spec: &SyntheticSpec,
    fragmentation_rate: f64,
    style: JunctionStyle,
) -> Result<TrackletStream, SyntheticError> {
    spec.validate()?;
    if !(0.0..1.0).contains(&fragmentation_rate) {
        return Err(SyntheticError::InvalidSpec("fragmentation_rate must lie in [0, 1)"));
    }
    let mut stream = TrackletStream {
        tracklets: Vec::new(),
        timeline: SelectionTimeline::new(),
        truth_track: Vec::new(),
        n_tracks: spec.n_tracks,
    };
    let mut next_id = 0u64;
    for t in 0..spec.n_tracks {
        let lay = layout(&mut track_rng(spec, t), spec);
        let track = Track {
            id: TrackId(t as u64),
            tracklet_ids: Vec::new(),
            observations: (0..lay.len)
                .map(|s| FrameObservation::new(lay.start + s as u64, lane_box(t, s)))
                .collect(),
            label: TrackLabel::Unknown,
            junctions: Vec::new(),
        };
        let mut cut_rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed ^ 0x5EED_F4A6, t as u64));
        let cuts: Vec<usize> = (1..lay.len).filter(|_| cut_rng.random::<f64>() < fragmentation_rate).collect();
        for (tracklet, frames) in fragment_track(&track, &cuts, style, next_id) {
            next_id += 1;
            for f in frames {
                stream.timeline.select(f, tracklet.id);
            }
            stream.truth_track.push(track.id);
            stream.tracklets.push(tracklet);
        }
    }
    Ok(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merge::{merge_tracklets, overlap_ratio, MergeConfig, TrackletStore};

    fn spec() -> SyntheticSpec {
        SyntheticSpec {
            n_categories: 3,
            n_tracks: 40,
            embedding_dims: 4,
            seed: 9,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn junction_overlap_is_at_least_point_six() {
        let s = generate_tracklet_stream(&spec(), 0.3).unwrap();
        for w in s.tracklets.windows(2).zip(s.truth_track.windows(2)) {
            let (pair, owners) = w;
            if owners[0] == owners[1] {
                assert!(overlap_ratio(&pair[0], &pair[1], 0.5) >= 0.6);
            }
        }
    }

    #[test]
    fn unfragmented_merge_is_identity() {
        let s = generate_tracklet_stream(&spec(), 0.0).unwrap();
        assert_eq!(s.tracklets.len(), 40);
        let store = TrackletStore::new(s.tracklets.clone()).unwrap();
        let tracks = merge_tracklets(&store, &s.timeline, &MergeConfig::default()).unwrap();
        assert_eq!(tracks.len(), 40);
    }

    #[test]
    fn fragmented_tracks_are_reassembled() {
        let s = generate_tracklet_stream(&spec(), 0.2).unwrap();
        assert!(s.tracklets.len() > 40);
        let store = TrackletStore::new(s.tracklets.clone()).unwrap();
        let tracks = merge_tracklets(&store, &s.timeline, &MergeConfig::default()).unwrap();
        assert_eq!(tracks.len(), 40);
        for tr in &tracks {
            let owner = s.truth_track[tr.tracklet_ids[0].0 as usize];
            assert!(tr.tracklet_ids.iter().all(|id| s.truth_track[id.0 as usize] == owner));
        }
    }

    #[test]
    fn disjoint_junctions_never_merge() {
        let s = generate_tracklet_stream_with(&spec(), 0.2, JunctionStyle::Disjoint).unwrap();
        let store = TrackletStore::new(s.tracklets.clone()).unwrap();
        let tracks = merge_tracklets(&store, &s.timeline, &MergeConfig::default()).unwrap();
        assert_eq!(tracks.len(), s.tracklets.len());
    }

    #[test]
    fn three_pieces() {
        let track = Track {
            id: TrackId(0),
            tracklet_ids: Vec::new(),
            observations: (0..12).map(|s| FrameObservation::new(s, lane_box(0, s as usize))).collect(),
            label: TrackLabel::Unknown,
            junctions: Vec::new(),
        };
        let pieces = fragment_track(&track, &[4, 8], JunctionStyle::Overlapping, 0);
        assert_eq!(pieces.len(), 3);
        assert_eq!(pieces[0].1, 0..4);
        assert_eq!(pieces[2].1, 8..12);
        assert_eq!(pieces[0].0.len(), 10);
    }
}
