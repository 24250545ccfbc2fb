//! Ball tree over a borrowed point set, used for exact k-nearest-neighbour
//! queries and the spatial side of Borůvka.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cluster::distance::{DistanceEngine, PointSet};

const LEAF_SIZE: usize = 40;

/// Relative slack subtracted from triangle-inequality bounds so that rounding
/// in the centre and radius can never prune a true candidate.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub start: usize,
    pub end: usize,
    /// Child node indices; `None` for leaves.
    pub children: Option<(usize, usize)>,
    pub radius: f64,
    /// Smallest point index stored under this node.
    pub min_index: usize,
}

pub(crate) struct BallTree<'a> {
    pub points: &'a PointSet,
    /// Tree position to point index.
    pub order: Vec<usize>,
    pub nodes: Vec<Node>,
    centers: Vec<f64>,
    /// Point rows copied in tree order, so leaf scans read contiguous memory.
    sorted: Vec<f64>,
}

impl<'a> BallTree<'a> {
    pub fn build<E: DistanceEngine>(engine: &E, points: &'a PointSet) -> Self {
        let n = points.len();
        let dims = points.dims();
        let mut order: Vec<usize> = (0..n).collect();
        let mut nodes: Vec<Node> = Vec::new();
        let mut centers: Vec<f64> = Vec::new();
        // (start, end, slot) where slot is the index already reserved for this node.
        let mut stack = vec![(0usize, n, 0usize)];
        nodes.push(placeholder());
        centers.resize(dims, 0.0);
        while let Some((start, end, slot)) = stack.pop() {
            let members = &mut order[start..end];
            let center = &mut centers[slot * dims..(slot + 1) * dims];
            center.iter_mut().for_each(|c| *c = 0.0);
            for &i in members.iter() {
                for (c, v) in center.iter_mut().zip(points.row(i)) {
                    *c += v;
                }
            }
            let count = (end - start).max(1) as f64;
            center.iter_mut().for_each(|c| *c /= count);
            let center: Vec<f64> = center.to_vec();
            let mut radius: f64 = 0.0;
            let mut min_index = usize::MAX;
            for &i in members.iter() {
                radius = radius.max(engine.distance(&center, points.row(i)));
                min_index = min_index.min(i);
            }
            nodes[slot] = Node {
                start,
                end,
                children: None,
                radius,
                min_index,
            };
            if end - start <= LEAF_SIZE {
                continue;
            }
            let axis = widest_axis(points, members);
            let mid = members.len() / 2;
            members.select_nth_unstable_by(mid, |&a, &b| {
                points.row(a)[axis]
                    .total_cmp(&points.row(b)[axis])
                    .then(a.cmp(&b))
            });
            let left = nodes.len();
            let right = left + 1;
            nodes.push(placeholder());
            nodes.push(placeholder());
            centers.resize((right + 1) * dims, 0.0);
            nodes[slot].children = Some((left, right));
            stack.push((start + mid, end, right));
            stack.push((start, start + mid, left));
        }
        let mut sorted = Vec::with_capacity(n * dims);
        for &i in &order {
            sorted.extend_from_slice(points.row(i));
        }
        Self {
            points,
            order,
            nodes,
            centers,
            sorted,
        }
    }

    /// Row of the point stored at tree position `pos`.
    #[inline]
    pub fn row_at(&self, pos: usize) -> &[f64] {
        let d = self.points.dims();
        &self.sorted[pos * d..(pos + 1) * d]
    }

    #[inline]
    pub fn center(&self, node: usize) -> &[f64] {
        let d = self.points.dims();
        &self.centers[node * d..(node + 1) * d]
    }

    /// Lower bound on the distance from `q` to any point under `node`.
    #[inline]
    pub fn lower_bound<E: DistanceEngine>(&self, engine: &E, q: &[f64], node: usize) -> f64 {
        let dc = engine.distance(q, self.center(node));
        let r = self.nodes[node].radius;
        let lb = dc - r - BOUND_SLACK * (dc + r);
        if lb > 0.0 {
            lb
        } else {
            0.0
        }
    }

    /// The `k` nearest points to point `q` (itself included) ordered by
    /// `(squared distance, index)`.
    pub fn knn<E: DistanceEngine>(&self, engine: &E, q: usize, k: usize) -> Vec<(f64, usize)> {
        let qr = self.points.row(q);
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let mut stack: Vec<(f64, usize)> = vec![(0.0, 0)];
        while let Some((lb, node)) = stack.pop() {
            if heap.len() == k && lb * lb > heap.peek().map_or(f64::INFINITY, |c| c.d2) {
                continue;
            }
            let info = &self.nodes[node];
            match info.children {
                None => {
                    for pos in info.start..info.end {
                        let p = self.order[pos];
                        let d2 = engine.squared(qr, self.row_at(pos));
                        let cand = Candidate { d2, index: p };
                        if heap.len() < k {
                            heap.push(cand);
                        } else if cand < *heap.peek().expect("heap is full") {
                            heap.pop();
                            heap.push(cand);
                        }
                    }
                }
                Some((l, r)) => {
                    let ll = self.lower_bound(engine, qr, l);
                    let lr = self.lower_bound(engine, qr, r);
                    // Visit the nearer child first.
                    if ll <= lr {
                        stack.push((lr, r));
                        stack.push((ll, l));
                    } else {
                        stack.push((ll, l));
                        stack.push((lr, r));
                    }
                }
            }
        }
        let mut out: Vec<(f64, usize)> = heap.into_iter().map(|c| (c.d2, c.index)).collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }
}

fn placeholder() -> Node {
    Node {
        start: 0,
        end: 0,
        children: None,
        radius: 0.0,
        min_index: usize::MAX,
    }
}

fn widest_axis(points: &PointSet, members: &[usize]) -> usize {
    let dims = points.dims();
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for &i in members {
        for (d, &v) in points.row(i).iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    let mut best = 0;
    for d in 1..dims {
        if hi[d] - lo[d] > hi[best] - lo[best] {
            best = d;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    d2: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.index.cmp(&other.index))
    }
}
