//! Core distances: the distance from each point to its `min_samples`-th
//! nearest neighbour, the point itself counting as the first.

use alloc::vec::Vec;

use super::balltree::BallTree;
use crate::cluster::distance::{DistanceEngine, PointSet};
use crate::math;

/// Nearest-neighbour lists kept for Borůvka.
pub(crate) struct NeighborLists {
    pub k: usize,
    /// `n x k` point indices ordered by `(squared distance, index)`.
    pub indices: Vec<usize>,
    /// False when some point outside the list sits at exactly the core distance.
    pub complete: Vec<bool>,
}

impl NeighborLists {
    pub fn of(&self, q: usize) -> &[usize] {
        &self.indices[q * self.k..(q + 1) * self.k]
    }
}

/// Public entry point returning plain (not squared) core distances.
pub fn core_distances<E: DistanceEngine>(engine: &E, points: &PointSet, min_samples: usize) -> Vec<f64> {
    brute_core_sq(engine, points, min_samples)
        .into_iter()
        .map(math::sqrt)
        .collect()
}

fn clamp_k(n: usize, min_samples: usize) -> usize {
    min_samples.clamp(1, n.max(1))
}

pub(crate) fn brute_core_sq<E: DistanceEngine>(engine: &E, points: &PointSet, min_samples: usize) -> Vec<f64> {
    let n = points.len();
    let k = clamp_k(n, min_samples);
    let one = |q: usize| -> f64 {
        let qr = points.row(q);
        let mut d: Vec<f64> = (0..n).map(|j| engine.squared(qr, points.row(j))).collect();
        let (_, kth, _) = d.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
        *kth
    };
    map_points(n, one)
}

/// Core distances (squared) from ball-tree queries, with the neighbour lists.
pub(crate) fn tree_core_sq<E: DistanceEngine>(
    engine: &E,
    tree: &BallTree<'_>,
    min_samples: usize,
) -> (Vec<f64>, NeighborLists) {
    let n = tree.points.len();
    let k = clamp_k(n, min_samples);
    // One extra neighbour reveals whether the k-th distance is tied.
    let extra = (k + 1).min(n);
    let results: Vec<(f64, Vec<usize>, bool)> = map_points(n, |q| {
        let nn = tree.knn(engine, q, extra);
        let core = nn[k - 1].0;
        let complete = nn.len() == k || nn[k].0 > core;
        (core, nn[..k].iter().map(|&(_, i)| i).collect(), complete)
    });
    let mut core = Vec::with_capacity(n);
    let mut indices = Vec::with_capacity(n * k);
    let mut complete = Vec::with_capacity(n);
    for (c, list, full) in results {
        core.push(c);
        indices.extend(list);
        complete.push(full);
    }
    (
        core,
        NeighborLists {
            k,
            indices,
            complete,
        },
    )
}

fn map_points<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::distance::Unrolled;
    use alloc::vec;

    #[test]
    fn first_neighbour_is_self() {
        let p = PointSet::new(3, 1, vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(core_distances(&Unrolled, &p, 1), vec![0.0, 0.0, 0.0]);
        assert_eq!(core_distances(&Unrolled, &p, 2), vec![1.0, 1.0, 2.0]);
        assert_eq!(core_distances(&Unrolled, &p, 9), vec![3.0, 2.0, 3.0]);
    }

    #[test]
    fn tree_agrees_with_scan() {
        let data: Vec<f64> = (0..600).map(|i| ((i * 37 % 101) as f64).sin() * 10.0).collect();
        let p = PointSet::new(300, 2, data).unwrap();
        let tree = BallTree::build(&Unrolled, &p);
        let (sq, lists) = tree_core_sq(&Unrolled, &tree, 6);
        assert_eq!(sq, brute_core_sq(&Unrolled, &p, 6));
        assert_eq!(lists.of(0).len(), 6);
    }
}
