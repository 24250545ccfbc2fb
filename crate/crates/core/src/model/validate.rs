use alloc::vec::Vec;
use core::fmt;

use super::geometry::MaskGeometry;
use super::track::Tracklet;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    /// Observation at `index` does not come after its predecessor.
    NotSorted { index: usize },
    DuplicateFrame { frame: u64 },
    RunLengthMismatch { frame: u64, expected: u64, actual: u64 },
    NegativeBoxSize { frame: u64 },
    NonFiniteBox { frame: u64 },
    ScoreOutOfRange { frame: u64 },
    ConfidenceOutOfRange,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "no observations"),
            Violation::NotSorted { index } => write!(f, "not sorted at observation {index}"),
            Violation::DuplicateFrame { frame } => write!(f, "duplicate frame {frame}"),
            Violation::RunLengthMismatch {
                frame,
                expected,
                actual,
            } => write!(
                f,
                "run-length sum mismatch at frame {frame}: {actual} != {expected}"
            ),
            Violation::NegativeBoxSize { frame } => write!(f, "negative box size at frame {frame}"),
            Violation::NonFiniteBox { frame } => write!(f, "non-finite box at frame {frame}"),
            Violation::ScoreOutOfRange { frame } => {
                write!(f, "proposal score outside [0,1] at frame {frame}")
            }
            Violation::ConfidenceOutOfRange => write!(f, "classifier confidence outside [0,1]"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_tracklet(t: &Tracklet) -> ValidationReport {
    let mut violations = Vec::new();
    if t.observations.is_empty() {
        violations.push(Violation::Empty);
    }
    for (i, pair) in t.observations.windows(2).enumerate() {
        if pair[1].frame == pair[0].frame {
            violations.push(Violation::DuplicateFrame {
                frame: pair[1].frame,
            });
        } else if pair[1].frame < pair[0].frame {
            violations.push(Violation::NotSorted { index: i + 1 });
        }
    }
    for obs in &t.observations {
        match &obs.geometry {
            MaskGeometry::Rle(m) => {
                let actual = m.run_sum();
                if actual != m.canvas_len() {
                    violations.push(Violation::RunLengthMismatch {
                        frame: obs.frame,
                        expected: m.canvas_len(),
                        actual,
                    });
                }
            }
            MaskGeometry::Box(b) => {
                if ![b.x, b.y, b.w, b.h].iter().all(|v| v.is_finite()) {
                    violations.push(Violation::NonFiniteBox { frame: obs.frame });
                } else if b.w < 0.0 || b.h < 0.0 {
                    violations.push(Violation::NegativeBoxSize { frame: obs.frame });
                }
            }
        }
        if let Some(s) = obs.proposal_score {
            if !(0.0..=1.0).contains(&s) {
                violations.push(Violation::ScoreOutOfRange { frame: obs.frame });
            }
        }
    }
    if let Some(c) = t.classifier_confidence {
        if !(0.0..=1.0).contains(&c) {
            violations.push(Violation::ConfidenceOutOfRange);
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundingBox, FrameObservation, RleMask, TrackletId};
    use alloc::string::ToString;
    use alloc::vec;

    fn obs(frame: u64) -> FrameObservation {
        FrameObservation::new(frame, MaskGeometry::Box(BoundingBox::new(0.0, 0.0, 4.0, 4.0)))
    }

    #[test]
    fn unsorted_frames_reported() {
        let t = Tracklet::new(TrackletId(1), vec![obs(3), obs(1), obs(2)]);
        let r = validate_tracklet(&t);
        assert!(r
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("not sorted")));
    }

    #[test]
    fn single_observation_is_valid() {
        let t = Tracklet::new(TrackletId(1), vec![obs(0)]);
        assert!(validate_tracklet(&t).is_valid());
    }

    #[test]
    fn short_run_lengths_reported() {
        let m = RleMask::new(3, 2, vec![1, 4]);
        let t = Tracklet::new(TrackletId(1), vec![FrameObservation::new(0, MaskGeometry::Rle(m))]);
        let r = validate_tracklet(&t);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0]
            .to_string()
            .starts_with("run-length sum mismatch"));
    }

    #[test]
    fn empty_and_duplicate() {
        let t = Tracklet::new(TrackletId(1), vec![]);
        assert_eq!(validate_tracklet(&t).violations, vec![Violation::Empty]);
        let t = Tracklet::new(TrackletId(1), vec![obs(2), obs(2)]);
        assert_eq!(
            validate_tracklet(&t).violations,
            vec![Violation::DuplicateFrame { frame: 2 }]
        );
    }

    #[test]
    fn negative_box() {
        let o = FrameObservation::new(5, MaskGeometry::Box(BoundingBox::new(0.0, 0.0, -1.0, 2.0)));
        let t = Tracklet::new(TrackletId(1), vec![o]);
        assert_eq!(
            validate_tracklet(&t).violations,
            vec![Violation::NegativeBoxSize { frame: 5 }]
        );
    }
}
