use std::collections::BTreeMap;

use trackmine_core::cluster::{hdbscan_fit, HdbscanConfig, NOISE};
use trackmine_core::embedding::{summarize_matrix, SummaryMode};
use trackmine_core::eval::ami;
use trackmine_core::merge::{merge_tracklets, MergeConfig, TrackletStore};
use trackmine_core::synthetic::{
    fragment_track, generate_collection, generate_tracklet_stream, generate_tracklet_stream_with, zipf_allocation,
    JunctionStyle, SyntheticError, SyntheticSpec,
};
use trackmine_core::{Annotation, TrackId};

fn separable(n_categories: usize, n_tracks: usize) -> SyntheticSpec {
    SyntheticSpec {
        n_categories,
        n_tracks,
        embedding_dims: 20,
        crops_per_track: (3, 10),
        seed: 21,
        ..SyntheticSpec::default()
    }
}

#[test]
fn well_separated_categories_are_recovered() {
    let spec = separable(16, 3000);
    let col = generate_collection(&spec).unwrap();
    let tracks = summarize_matrix(&col.crops, SummaryMode::ClosestToMean).unwrap().embeddings;
    let fit = hdbscan_fit(&tracks, &HdbscanConfig::new(30)).unwrap();
    let labels = &fit.result.assignments;
    let sizes = &col.truth.category_sizes;

    let big: Vec<usize> = (0..spec.n_tracks).filter(|&t| sizes[col.truth.category[t]] >= 30).collect();
    let truth: Vec<usize> = big.iter().map(|&t| col.truth.category[t]).collect();
    let pred: Vec<i32> = big.iter().map(|&t| labels[t]).collect();
    let score = ami(&truth, &pred).unwrap();
    assert!(score >= 0.99, "AMI {score}");
    assert_eq!(fit.result.n_clusters, sizes.iter().filter(|&&s| s >= 30).count());

    // Categories too small to form a cluster end up as noise.
    for t in 0..spec.n_tracks {
        if sizes[col.truth.category[t]] < 30 {
            assert_eq!(labels[t], NOISE, "track {t}");
        }
    }
}

#[test]
fn histogram_is_the_zipf_allocation() {
    let spec = separable(36, 12_000);
    let col = generate_collection(&spec).unwrap();
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &col.tracks {
        if let Annotation::Category(c) = &t.annotation {
            *tally.entry(c).or_insert(0) += 1;
        }
    }
    let expected = zipf_allocation(12_000, 36, 1.1);
    for (c, &n) in expected.iter().enumerate() {
        assert_eq!(tally.get(spec.category_name(c).as_str()).copied().unwrap_or(0), n);
    }
    let harmonic: f64 = (1..=36).map(|r| (r as f64).powf(-1.1)).sum();
    assert!((expected[0] as f64 - 12_000.0 / harmonic).abs() < 1.0);
}

#[test]
fn generation_is_deterministic_and_seed_dependent() {
    let spec = SyntheticSpec {
        outlier_fraction: 0.05,
        tracking_error_fraction: 0.05,
        ..separable(6, 400)
    };
    let a = generate_collection(&spec).unwrap();
    assert_eq!(a, generate_collection(&spec).unwrap());
    let bits = |m: &trackmine_core::EmbeddingMatrix| m.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.crops), bits(&generate_collection(&spec).unwrap().crops));
    let other = generate_collection(&SyntheticSpec { seed: 22, ..spec }).unwrap();
    assert_ne!(bits(&a.crops), bits(&other.crops));
}

#[test]
fn tracking_errors_sit_on_another_center() {
    let spec = SyntheticSpec {
        tracking_error_fraction: 0.1,
        ..separable(5, 300)
    };
    let col = generate_collection(&spec).unwrap();
    let tracks = summarize_matrix(&col.crops, SummaryMode::Mean).unwrap().embeddings;
    let dims = spec.embedding_dims;
    let nearest = |row: &[f32]| {
        (0..spec.n_categories)
            .min_by(|&a, &b| {
                let d = |c: usize| -> f64 {
                    row.iter()
                        .zip(&col.truth.centers[c * dims..(c + 1) * dims])
                        .map(|(x, y)| (*x as f64 - y).powi(2))
                        .sum()
                };
                d(a).total_cmp(&d(b))
            })
            .unwrap()
    };
    let mut errors = 0;
    for t in 0..spec.n_tracks {
        let near = nearest(tracks.row(t));
        if col.truth.tracking_error[t] {
            errors += 1;
            assert_eq!(col.tracks[t].annotation, Annotation::TrackingError);
            assert_ne!(near, col.truth.category[t]);
        } else {
            assert_eq!(near, col.truth.category[t]);
        }
    }
    assert_eq!(errors, 30);
}

#[test]
fn too_many_categories_for_the_space_is_rejected() {
    let spec = SyntheticSpec {
        n_categories: 40,
        embedding_dims: 1,
        ..separable(40, 100)
    };
    assert!(matches!(generate_collection(&spec), Err(SyntheticError::InfeasibleSeparation { .. })));
}

#[test]
fn stream_reassembles_into_the_original_tracks() {
    let spec = separable(4, 150);
    for rate in [0.0, 0.1, 0.3] {
        let s = generate_tracklet_stream(&spec, rate).unwrap();
        let store = TrackletStore::new(s.tracklets.clone()).unwrap();
        let tracks = merge_tracklets(&store, &s.timeline, &MergeConfig::default()).unwrap();
        assert_eq!(tracks.len(), spec.n_tracks, "rate {rate}");
        let mut seen: Vec<TrackId> = tracks
            .iter()
            .map(|tr| {
                let owner = s.truth_track[tr.tracklet_ids[0].0 as usize];
                assert!(tr.tracklet_ids.iter().all(|id| s.truth_track[id.0 as usize] == owner));
                owner
            })
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), spec.n_tracks);
    }
}

#[test]
fn three_piece_fragmentation_merges_back() {
    let spec = separable(3, 60);
    let col = generate_collection(&spec).unwrap();
    let mut tracklets = Vec::new();
    let mut timeline = trackmine_core::merge::SelectionTimeline::new();
    let mut next = 0;
    for at in &col.tracks {
        let len = at.track.observations.len();
        let cuts = [len / 3, 2 * len / 3];
        for (t, frames) in fragment_track(&at.track, &cuts, JunctionStyle::Overlapping, next) {
            next += 1;
            for f in frames {
                timeline.select(f, t.id);
            }
            tracklets.push(t);
        }
    }
    assert!(tracklets.len() > 2 * spec.n_tracks);
    let store = TrackletStore::new(tracklets).unwrap();
    let merged = merge_tracklets(&store, &timeline, &MergeConfig::default()).unwrap();
    assert_eq!(merged.len(), spec.n_tracks);
}

#[test]
fn junctions_below_threshold_never_merge() {
    let spec = separable(3, 80);
    let s = generate_tracklet_stream_with(&spec, 0.3, JunctionStyle::Disjoint).unwrap();
    let store = TrackletStore::new(s.tracklets.clone()).unwrap();
    let merged = merge_tracklets(&store, &s.timeline, &MergeConfig::default()).unwrap();
    assert_eq!(merged.len(), s.tracklets.len());
    assert!(s.tracklets.len() > spec.n_tracks);
}
