//! Adjusted mutual information with the exact permutation-model expectation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::EvalError;
use crate::math;

/// How the two entropies are combined in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AmiNormalization {
    #[default]
    Arithmetic,
    Max,
}

/// Sparse contingency table of two labelings.
struct Contingency {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    /// Non-zero cells as `(row, col, count)`.
    cells: Vec<(usize, usize, usize)>,
}

impl Contingency {
    fn new<T: Ord, P: Ord>(truth: &[T], pred: &[P]) -> Self {
        let mut ti: BTreeMap<&T, usize> = BTreeMap::new();
        let mut pi: BTreeMap<&P, usize> = BTreeMap::new();
        let mut cells: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (t, p) in truth.iter().zip(pred) {
            let next = ti.len();
            let r = *ti.entry(t).or_insert(next);
            let next = pi.len();
            let c = *pi.entry(p).or_insert(next);
            *cells.entry((r, c)).or_insert(0) += 1;
        }
        let mut rows = alloc::vec![0; ti.len()];
        let mut cols = alloc::vec![0; pi.len()];
        for (&(r, c), &v) in &cells {
            rows[r] += v;
            cols[c] += v;
        }
        Self {
            n: truth.len(),
            rows,
            cols,
            cells: cells.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        }
    }

    /// Every class maps onto exactly one cluster and vice versa.
    fn is_bijective(&self) -> bool {
        self.rows.len() == self.cols.len() && self.cells.len() == self.rows.len()
    }

    fn mutual_information(&self) -> f64 {
        let nf = self.n as f64;
        // Terms keyed symmetrically and summed in sorted order, so swapping
        // the two labelings gives the same bits.
        let mut terms: Vec<(usize, usize, usize)> = self
            .cells
            .iter()
            .map(|&(r, c, nij)| {
                let (a, b) = (self.rows[r], self.cols[c]);
                (nij, a.min(b), a.max(b))
            })
            .collect();
        terms.sort_unstable();
        terms
            .iter()
            .map(|&(nij, a, b)| {
                let v = nij as f64;
                v / nf * math::ln(nf * v / (a as f64 * b as f64))
            })
            .sum()
    }
}

pub fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / nf;
            p * math::ln(p)
        })
        .sum::<f64>()
}

/// Mutual information in nats.
pub fn mutual_information<T: Ord, P: Ord>(truth: &[T], pred: &[P]) -> Result<f64, EvalError> {
    check(truth.len(), pred.len())?;
    Ok(Contingency::new(truth, pred).mutual_information())
}

/// Expected mutual information between random labelings with the given
/// class sizes (hypergeometric model).
pub fn expected_mutual_information(rows: &[usize], cols: &[usize]) -> f64 {
    let n: usize = rows.iter().sum();
    if n == 0 {
        return 0.0;
    }
    // ln k! for k = 0..=n.
    let mut lfact = alloc::vec![0.0f64; n + 1];
    for k in 1..=n {
        lfact[k] = lfact[k - 1] + math::ln(k as f64);
    }
    let nf = n as f64;
    // Equal marginals contribute identical terms; group them.
    let group = |v: &[usize]| {
        let mut m: BTreeMap<usize, usize> = BTreeMap::new();
        for &x in v {
            *m.entry(x).or_insert(0) += 1;
        }
        m
    };
    let (ga, gb) = (group(rows), group(cols));
    let mut pairs: Vec<(usize, usize, usize)> = Vec::with_capacity(ga.len() * gb.len());
    for (&a, &ma) in &ga {
        for (&b, &mb) in &gb {
            pairs.push((a.min(b), a.max(b), ma * mb));
        }
    }
    pairs.sort_unstable();
    let mut emi = 0.0;
    for (a, b, mult) in pairs {
        let lo = (a + b).saturating_sub(n).max(1);
        let hi = a;
        let fixed = lfact[a] + lfact[b] + lfact[n - a] + lfact[n - b] - lfact[n];
        let mut term = 0.0;
        for nij in lo..=hi {
            let v = nij as f64;
            let log_p = fixed - lfact[nij] - lfact[a - nij] - lfact[b - nij] - lfact[n + nij - a - b];
            term += v / nf * math::ln(nf * v / (a as f64 * b as f64)) * math::exp(log_p);
        }
        emi += term * mult as f64;
    }
    emi
}

pub fn ami<T: Ord, P: Ord>(truth: &[T], pred: &[P]) -> Result<f64, EvalError> {
    ami_with(truth, pred, AmiNormalization::Arithmetic)
}

pub fn ami_with<T: Ord, P: Ord>(truth: &[T], pred: &[P], norm: AmiNormalization) -> Result<f64, EvalError> {
    check(truth.len(), pred.len())?;
    let ct = Contingency::new(truth, pred);
    if ct.is_bijective() {
        return Ok(1.0);
    }
    let mi = ct.mutual_information();
    let emi = expected_mutual_information(&ct.rows, &ct.cols);
    let (ht, hp) = (entropy(&ct.rows), entropy(&ct.cols));
    let normalizer = match norm {
        AmiNormalization::Arithmetic => (ht + hp) / 2.0,
        AmiNormalization::Max => ht.max(hp),
    };
    let mut denom = normalizer - emi;
    // Keep the sign but avoid dividing by something vanishingly small.
    if denom < 0.0 {
        denom = denom.min(-f64::EPSILON);
    } else {
        denom = denom.max(f64::EPSILON);
    }
    Ok((mi - emi) / denom)
}

fn check(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::LengthMismatch { truth: a, pred: b });
    }
    if a == 0 {
        return Err(EvalError::Empty);
    }
    Ok(())
}
