//! Discovery-quality evaluation: AMI, outlier-fraction curves, annotation
//! filtering and long-tail reports.

pub mod ami;
pub mod curve;
pub mod filter;
pub mod report;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cluster::{ClusteringResult, NOISE};

pub use ami::{ami, ami_with, expected_mutual_information, mutual_information, AmiNormalization};
pub use curve::{exclusion_order, fraction_grid, outlier_curve, outlier_curve_with, CurvePoint, EvaluationCurve};
pub use filter::{eval_filter, filter_annotations, ExclusionCounts, FilterOutcome};
pub use report::{cluster_report, distribution_report, CategoryDistribution, ClusterEntry, ClusterSummary};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("label vectors differ in length ({truth} vs {pred})")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("no points to evaluate")]
    Empty,
    #[error("column {column} has {actual} entries, expected {expected}")]
    Misaligned {
        column: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("outlier score at position {0} is negative or not finite")]
    BadScore(usize),
    #[error("invalid fractions: {0}")]
    InvalidFractions(&'static str),
}

/// Points with ground truth, aligned column by column.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledEvalSet {
    pub ids: Vec<String>,
    pub truth: Vec<String>,
    /// Cluster labels, [`NOISE`] allowed.
    pub pred: Vec<i32>,
    pub scores: Vec<f64>,
    /// Whether the clusterer chose its own noise set.
    pub marks_noise: bool,
}

impl LabeledEvalSet {
    pub fn new(
        ids: Vec<String>,
        truth: Vec<String>,
        pred: Vec<i32>,
        scores: Vec<f64>,
        marks_noise: bool,
    ) -> Result<Self, EvalError> {
        let n = ids.len();
        for (column, len) in [("truth", truth.len()), ("pred", pred.len()), ("scores", scores.len())] {
            if len != n {
                return Err(EvalError::Misaligned {
                    column,
                    expected: n,
                    actual: len,
                });
            }
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite() || *s < 0.0) {
            return Err(EvalError::BadScore(i));
        }
        Ok(Self {
            ids,
            truth,
            pred,
            scores,
            marks_noise,
        })
    }

    /// Keeps the rows of `result` whose id has a ground-truth category, in row order.
    pub fn from_result(
        result: &ClusteringResult,
        row_ids: &[String],
        truth: &BTreeMap<String, String>,
    ) -> Result<Self, EvalError> {
        if row_ids.len() != result.len() {
            return Err(EvalError::Misaligned {
                column: "row_ids",
                expected: result.len(),
                actual: row_ids.len(),
            });
        }
        let (mut ids, mut t, mut pred, mut scores) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (i, id) in row_ids.iter().enumerate() {
            if let Some(cat) = truth.get(id) {
                ids.push(id.clone());
                t.push(cat.clone());
                pred.push(result.assignments[i]);
                scores.push(result.outlier_scores[i]);
            }
        }
        Self::new(ids, t, pred, scores, result.marks_noise())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn noise_count(&self) -> usize {
        self.pred.iter().filter(|&&l| l == NOISE).count()
    }
}
