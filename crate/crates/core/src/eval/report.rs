//! Category histograms and per-cluster summaries.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::LabeledEvalSet;
use crate::cluster::{ClusteringResult, NOISE};
use crate::model::{AnnotatedTrack, Annotation, TrackLabel};

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CategoryDistribution {
    /// Sorted by descending count, then by name.
    pub counts: Vec<(String, usize)>,
    pub cutoff: usize,
    /// Number of categories with fewer than `cutoff` tracks.
    pub below_cutoff: usize,
    pub total_tracks: usize,
    pub categorized: usize,
    pub unknown_valid: usize,
    pub tracking_errors: usize,
    /// Tracking errors over all annotated tracks; `None` when there are none.
    pub error_rate: Option<f64>,
    /// Split by the detector's label rather than the annotation.
    pub detector_known: usize,
    pub detector_unknown: usize,
}

pub fn distribution_report(tracks: &[AnnotatedTrack], cutoff: usize) -> CategoryDistribution {
    let mut by_cat: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out = CategoryDistribution {
        cutoff,
        total_tracks: tracks.len(),
        ..Default::default()
    };
    for t in tracks {
        match &t.annotation {
            Annotation::Category(c) => {
                *by_cat.entry(c).or_insert(0) += 1;
                out.categorized += 1;
            }
            Annotation::UnknownValid => out.unknown_valid += 1,
            Annotation::TrackingError => out.tracking_errors += 1,
        }
        match t.track.label {
            TrackLabel::Known(_) => out.detector_known += 1,
            TrackLabel::Unknown => out.detector_unknown += 1,
        }
    }
    let mut counts: Vec<(String, usize)> = by_cat.into_iter().map(|(c, n)| (String::from(c), n)).collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out.below_cutoff = counts.iter().filter(|&&(_, n)| n < cutoff).count();
    out.counts = counts;
    if !tracks.is_empty() {
        out.error_rate = Some(out.tracking_errors as f64 / tracks.len() as f64);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterEntry {
    pub label: i32,
    /// Members across the whole clustering, annotated or not.
    pub size: usize,
    pub annotated: usize,
    pub dominant: Option<String>,
    pub dominant_count: usize,
    /// `dominant_count / annotated`; `None` without annotated members.
    pub purity: Option<f64>,
    /// The dominant category is not one the detector was trained on.
    pub novel: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterSummary {
    /// Sorted by descending size, then label.
    pub clusters: Vec<ClusterEntry>,
    pub min_cluster_display: usize,
    /// Clusters smaller than the display threshold.
    pub hidden: usize,
    pub noise: usize,
}

pub fn cluster_report(
    result: &ClusteringResult,
    evalset: &LabeledEvalSet,
    min_cluster_display: usize,
    known_categories: &[String],
) -> ClusterSummary {
    let known: BTreeSet<&str> = known_categories.iter().map(String::as_str).collect();
    let mut sizes: BTreeMap<i32, usize> = BTreeMap::new();
    for &l in &result.assignments {
        if l != NOISE {
            *sizes.entry(l).or_insert(0) += 1;
        }
    }
    let mut tallies: BTreeMap<i32, BTreeMap<&str, usize>> = BTreeMap::new();
    for (l, t) in evalset.pred.iter().zip(&evalset.truth) {
        if *l != NOISE {
            *tallies.entry(*l).or_default().entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut clusters: Vec<ClusterEntry> = sizes
        .iter()
        .map(|(&label, &size)| {
            let tally = tallies.get(&label);
            let annotated = tally.map_or(0, |t| t.values().sum());
            // Largest count wins; BTreeMap order makes the smaller name win ties.
            let dominant = tally.and_then(|t| {
                t.iter()
                    .fold(None, |best: Option<(&str, usize)>, (&c, &n)| match best {
                        Some((_, bn)) if bn >= n => best,
                        _ => Some((c, n)),
                    })
            });
            ClusterEntry {
                label,
                size,
                annotated,
                dominant: dominant.map(|(c, _)| String::from(c)),
                dominant_count: dominant.map_or(0, |(_, n)| n),
                purity: dominant.map(|(_, n)| n as f64 / annotated as f64),
                novel: dominant.is_some_and(|(c, _)| !known.contains(c)),
            }
        })
        .collect();
    clusters.sort_by(|a, b| b.size.cmp(&a.size).then(a.label.cmp(&b.label)));
    let shown = clusters.iter().filter(|c| c.size >= min_cluster_display).count();
    let hidden = clusters.len() - shown;
    clusters.truncate(shown);
    ClusterSummary {
        clusters,
        min_cluster_display,
        hidden,
        noise: result.noise_count(),
    }
}
