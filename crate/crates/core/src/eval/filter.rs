//! Selection of the annotated tracks that take part in evaluation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{AnnotatedTrack, Annotation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExclusionCounts {
    pub unknown: usize,
    pub tracking_error: usize,
    /// Tracks of categories with fewer than `min_instances` members.
    pub rare_category: usize,
}

impl ExclusionCounts {
    pub fn total(&self) -> usize {
        self.unknown + self.tracking_error + self.rare_category
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterOutcome {
    /// Input positions kept, ascending.
    pub retained: Vec<usize>,
    pub excluded: ExclusionCounts,
    /// Dropped categories with their sizes, by name.
    pub rare_categories: Vec<(String, usize)>,
}

pub fn eval_filter(tracks: &[AnnotatedTrack], min_instances: usize) -> FilterOutcome {
    let annotations: Vec<&Annotation> = tracks.iter().map(|t| &t.annotation).collect();
    filter_annotations(&annotations, min_instances)
}

/// Drops unknown objects, tracking errors and categories with fewer than
/// `min_instances` tracks.
pub fn filter_annotations(annotations: &[&Annotation], min_instances: usize) -> FilterOutcome {
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for a in annotations {
        if let Some(c) = a.category() {
            *sizes.entry(c).or_insert(0) += 1;
        }
    }
    let mut excluded = ExclusionCounts::default();
    let mut retained = Vec::new();
    for (i, a) in annotations.iter().enumerate() {
        match a {
            Annotation::UnknownValid => excluded.unknown += 1,
            Annotation::TrackingError => excluded.tracking_error += 1,
            Annotation::Category(c) if sizes[c.as_str()] < min_instances => excluded.rare_category += 1,
            Annotation::Category(_) => retained.push(i),
        }
    }
    let rare_categories = sizes
        .into_iter()
        .filter(|&(_, n)| n < min_instances)
        .map(|(c, n)| (String::from(c), n))
        .collect();
    FilterOutcome {
        retained,
        excluded,
        rare_categories,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cats(spec: &[(&str, usize)]) -> Vec<Annotation> {
        spec.iter()
            .flat_map(|&(c, n)| core::iter::repeat(Annotation::Category(String::from(c))).take(n))
            .collect()
    }

    #[test]
    fn only_errors() {
        let a = vec![Annotation::TrackingError; 4];
        let refs: Vec<&Annotation> = a.iter().collect();
        let out = filter_annotations(&refs, 30);
        assert!(out.retained.is_empty());
        assert_eq!(out.excluded.total(), 4);
        assert_eq!(out.excluded.tracking_error, 4);
    }

    #[test]
    fn boundary_is_kept() {
        let a = cats(&[("x", 30), ("y", 29)]);
        let refs: Vec<&Annotation> = a.iter().collect();
        let out = filter_annotations(&refs, 30);
        assert_eq!(out.retained.len(), 30);
        assert_eq!(out.excluded.rare_category, 29);
        assert_eq!(out.rare_categories, vec![(String::from("y"), 29)]);
    }

    #[test]
    fn long_tail_counts() {
        let a = cats(&[("car", 2405), ("greenery", 1124), ("window", 370), ("person", 272), ("tail", 29)]);
        let refs: Vec<&Annotation> = a.iter().collect();
        let out = filter_annotations(&refs, 30);
        assert_eq!(out.retained.len(), 2405 + 1124 + 370 + 272);
        assert_eq!(out.rare_categories, vec![(String::from("tail"), 29)]);
    }

    #[test]
    fn idempotent() {
        let mut a = cats(&[("x", 5), ("y", 3), ("z", 9)]);
        a.push(Annotation::UnknownValid);
        let refs: Vec<&Annotation> = a.iter().collect();
        let first = filter_annotations(&refs, 4);
        let kept: Vec<&Annotation> = first.retained.iter().map(|&i| refs[i]).collect();
        let second = filter_annotations(&kept, 4);
        assert_eq!(second.retained.len(), kept.len());
        assert_eq!(second.excluded.total(), 0);
    }
}
