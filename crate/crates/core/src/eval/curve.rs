//! AMI as a function of the fraction of points set aside as outliers.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::ami::{ami_with, AmiNormalization};
use super::{EvalError, LabeledEvalSet};
use crate::cluster::NOISE;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    /// Excluded fraction of the evaluated set.
    pub fraction: f64,
    /// `None` when every point was excluded.
    pub ami: Option<f64>,
    /// Points left after exclusion.
    pub n: usize,
    /// The clusterer's own noise fraction.
    pub distinguished: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationCurve {
    pub points: Vec<CurvePoint>,
    pub distinguished: Option<usize>,
    pub normalization: AmiNormalization,
    pub n_total: usize,
}

/// Evenly spaced fractions from `start` to `stop` inclusive, rounded to 12
/// decimals so that `0:0.5:0.05` prints cleanly.
pub fn fraction_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, EvalError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(EvalError::InvalidFractions("need finite start <= stop and step > 0"));
    }
    let count = math::floor((stop - start) / step + 1e-9) as usize;
    Ok((0..=count)
        .map(|i| libm::round((start + i as f64 * step) * 1e12) / 1e12)
        .collect())
}

/// Order in which points are set aside: the clusterer's noise first, then by
/// descending outlier score, ties to the smaller id.
pub fn exclusion_order(set: &LabeledEvalSet) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| {
        let noise = |i: usize| set.pred[i] != NOISE;
        noise(a)
            .cmp(&noise(b))
            .then(set.scores[b].total_cmp(&set.scores[a]))
            .then_with(|| id_cmp(&set.ids[a], &set.ids[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Numeric ids compare as numbers, anything else as text.
fn id_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

pub fn outlier_curve(set: &LabeledEvalSet, fractions: &[f64]) -> Result<EvaluationCurve, EvalError> {
    outlier_curve_with(set, fractions, AmiNormalization::Arithmetic)
}

/// Noise points that survive exclusion are scored as singleton clusters.
pub fn outlier_curve_with(
    set: &LabeledEvalSet,
    fractions: &[f64],
    norm: AmiNormalization,
) -> Result<EvaluationCurve, EvalError> {
    if set.is_empty() {
        return Err(EvalError::Empty);
    }
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(EvalError::InvalidFractions("fractions must lie in [0, 1]"));
    }
    if fractions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::InvalidFractions("fractions must be strictly increasing"));
    }
    let n = set.len();
    let mut grid: Vec<(f64, bool)> = fractions.iter().map(|&f| (f, false)).collect();
    if set.marks_noise {
        let nf = set.noise_count() as f64 / n as f64;
        match grid.iter().position(|&(f, _)| (f - nf).abs() < 1e-12) {
            Some(i) => grid[i].1 = true,
            None => {
                let at = grid.partition_point(|&(f, _)| f < nf);
                grid.insert(at, (nf, true));
            }
        }
    }

    let order = exclusion_order(set);
    let mut points = Vec::with_capacity(grid.len());
    for &(fraction, distinguished) in &grid {
        let drop = (math::ceil(fraction * n as f64 - 1e-9).max(0.0) as usize).min(n);
        let mut keep: Vec<usize> = order[drop..].to_vec();
        keep.sort_unstable();
        let ami = if keep.is_empty() {
            None
        } else {
            let truth: Vec<&str> = keep.iter().map(|&i| set.truth[i].as_str()).collect();
            let pred: Vec<i64> = keep
                .iter()
                .map(|&i| if set.pred[i] == NOISE { -1 - i as i64 } else { set.pred[i] as i64 })
                .collect();
            Some(ami_with(&truth, &pred, norm)?)
        };
        points.push(CurvePoint {
            fraction,
            ami,
            n: keep.len(),
            distinguished,
        });
    }
    Ok(EvaluationCurve {
        distinguished: points.iter().position(|p| p.distinguished),
        points,
        normalization: norm,
        n_total: n,
    })
}
