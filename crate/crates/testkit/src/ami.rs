//! AMI with the expected mutual information taken as the plain average over
//! every rearrangement of the predicted labels.

use std::collections::HashMap;

fn mi(truth: &[usize], pred: &[usize]) -> f64 {
    let n = truth.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut a: HashMap<usize, f64> = HashMap::new();
    let mut b: HashMap<usize, f64> = HashMap::new();
    for (&t, &p) in truth.iter().zip(pred) {
        *joint.entry((t, p)).or_default() += 1.0;
        *a.entry(t).or_default() += 1.0;
        *b.entry(p).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|(&(t, p), &c)| (c / n) * ((c / n) / ((a[&t] / n) * (b[&p] / n))).ln())
        .sum()
}

fn entropy(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let mut m: HashMap<usize, f64> = HashMap::new();
    for &l in labels {
        *m.entry(l).or_default() += 1.0;
    }
    m.values().map(|&c| -(c / n) * (c / n).ln()).sum()
}

/// Lexicographic successor; false once the last arrangement is reached.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Mean MI over all distinct arrangements of `pred` against fixed `truth`.
/// Every distinct arrangement occurs equally often among all permutations,
/// so this is the permutation-model expectation.
pub fn expected_mi(truth: &[usize], pred: &[usize]) -> f64 {
    let mut p = pred.to_vec();
    p.sort_unstable();
    let (mut total, mut count) = (0.0, 0u64);
    loop {
        total += mi(truth, &p);
        count += 1;
        if !next_permutation(&mut p) {
            break;
        }
    }
    total / count as f64
}

/// `max_norm` selects the larger entropy instead of the arithmetic mean.
pub fn ami(truth: &[usize], pred: &[usize], max_norm: bool) -> f64 {
    let (ht, hp) = (entropy(truth), entropy(pred));
    let emi = expected_mi(truth, pred);
    let norm = if max_norm { ht.max(hp) } else { 0.5 * (ht + hp) };
    let denom = norm - emi;
    if denom.abs() < 1e-12 {
        // Only identical partitions get here.
        return 1.0;
    }
    (mi(truth, pred) - emi) / denom
}
