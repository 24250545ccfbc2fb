//! Minimum spanning tree of the mutual-reachability graph.
//!
//! Edges are ordered by the strict key `(w², min endpoint, max endpoint)`, so
//! the tree is unique and both strategies must return the same edge set.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::balltree::BallTree;
use super::core_distance::NeighborLists;
use crate::cluster::distance::{DistanceEngine, PointSet};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MstEdge {
    /// Smaller endpoint.
    pub a: usize,
    pub b: usize,
    /// Mutual-reachability distance.
    pub weight: f64,
    pub(crate) weight_sq: f64,
}

impl MstEdge {
    pub(crate) fn new(i: usize, j: usize, weight_sq: f64) -> Self {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Self {
            a,
            b,
            weight: math::sqrt(weight_sq),
            weight_sq,
        }
    }

    pub(crate) fn key_cmp(&self, other: &Self) -> Ordering {
        key_cmp((self.weight_sq, self.a, self.b), (other.weight_sq, other.a, other.b))
    }
}

type Key = (f64, usize, usize);

#[inline]
fn key(w2: f64, i: usize, j: usize) -> Key {
    if i < j {
        (w2, i, j)
    } else {
        (w2, j, i)
    }
}

#[inline]
fn key_cmp(x: Key, y: Key) -> Ordering {
    x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2))
}

#[inline]
fn mreach_sq(core_sq: &[f64], i: usize, j: usize, d2: f64) -> f64 {
    d2.max(core_sq[i]).max(core_sq[j])
}

/// Prim's algorithm on the implicit complete graph, `O(n²)` distance
/// evaluations at most, `O(n)` memory.
pub(crate) fn prim<E: DistanceEngine>(engine: &E, points: &PointSet, core_sq: &[f64]) -> Vec<MstEdge> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    // Parallel arrays over the vertices not yet in the tree.
    let mut rem: Vec<usize> = (1..n).collect();
    let mut best_w2: Vec<f64> = vec![f64::INFINITY; n - 1];
    let mut best_from: Vec<usize> = vec![usize::MAX; n - 1];
    let mut edges = Vec::with_capacity(n - 1);
    let mut current = 0usize;

    while !rem.is_empty() {
        let cur_row = points.row(current);
        let cur_core = core_sq[current];
        let relax = |j: usize, w: &mut f64, from: &mut usize| {
            let floor = cur_core.max(core_sq[j]);
            if floor > *w {
                return;
            }
            let w2 = mreach_sq(core_sq, current, j, engine.squared(cur_row, points.row(j)));
            if *from == usize::MAX || key_cmp(key(w2, current, j), key(*w, *from, j)) == Ordering::Less {
                *w = w2;
                *from = current;
            }
        };
        let better = |x: (usize, Key), y: (usize, Key)| {
            if key_cmp(x.1, y.1) == Ordering::Greater {
                y
            } else {
                x
            }
        };
        let none = (usize::MAX, (f64::INFINITY, usize::MAX, usize::MAX));

        #[cfg(feature = "parallel")]
        let (slot, _) = {
            use rayon::prelude::*;
            rem.par_iter()
                .zip(best_w2.par_iter_mut())
                .zip(best_from.par_iter_mut())
                .enumerate()
                .with_min_len(1024)
                .map(|(s, ((&j, w), from))| {
                    relax(j, w, from);
                    (s, key(*w, *from, j))
                })
                .reduce(|| none, better)
        };
        #[cfg(not(feature = "parallel"))]
        let (slot, _) = {
            let mut acc = none;
            for (s, ((&j, w), from)) in rem.iter().zip(best_w2.iter_mut()).zip(best_from.iter_mut()).enumerate() {
                relax(j, w, from);
                acc = better(acc, (s, key(*w, *from, j)));
            }
            acc
        };

        let next = rem[slot];
        edges.push(MstEdge::new(best_from[slot], next, best_w2[slot]));
        rem.swap_remove(slot);
        best_w2.swap_remove(slot);
        best_from.swap_remove(slot);
        current = next;
    }
    edges.sort_by(MstEdge::key_cmp);
    edges
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }
}

const MIXED: usize = usize::MAX;

/// Borůvka rounds with per-component nearest-edge searches over a ball tree.
pub(crate) fn boruvka<E: DistanceEngine>(
    engine: &E,
    tree: &BallTree<'_>,
    core_sq: &[f64],
    neighbors: &NeighborLists,
) -> Vec<MstEdge> {
    let points = tree.points;
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let node_min_core = node_min_core(tree, core_sq);
    let mut uf = UnionFind::new(n);
    let mut edges: Vec<MstEdge> = Vec::with_capacity(n - 1);
    let mut comp = vec![0usize; n];
    let mut node_comp = vec![MIXED; tree.nodes.len()];

    while edges.len() + 1 < n {
        for (i, c) in comp.iter_mut().enumerate() {
            *c = uf.find(i);
        }
        label_nodes(tree, &comp, &mut node_comp);

        // Members of each component, most promising (smallest core) first.
        let mut members: Vec<usize> = (0..n).collect();
        members.sort_by(|&x, &y| {
            comp[x]
                .cmp(&comp[y])
                .then(core_sq[x].total_cmp(&core_sq[y]))
                .then(x.cmp(&y))
        });
        let groups: Vec<&[usize]> = members.chunk_by(|&x, &y| comp[x] == comp[y]).collect();

        let search = |group: &&[usize]| -> Option<Key> {
            let c = comp[group[0]];
            let mut best: Option<Key> = None;
            for &q in group.iter() {
                component_search(engine, tree, core_sq, neighbors, &node_min_core, &comp, &node_comp, c, q, &mut best);
            }
            best
        };
        #[cfg(feature = "parallel")]
        let mut found: Vec<Key> = {
            use rayon::prelude::*;
            groups.par_iter().filter_map(search).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let mut found: Vec<Key> = groups.iter().filter_map(search).collect();

        found.sort_by(|x, y| key_cmp(*x, *y));
        found.dedup_by(|x, y| key_cmp(*x, *y) == Ordering::Equal);
        let before = edges.len();
        for (w2, a, b) in found {
            if uf.union(a, b) {
                edges.push(MstEdge::new(a, b, w2));
            }
        }
        assert!(edges.len() > before, "Borůvka round made no progress");
    }
    edges.sort_by(MstEdge::key_cmp);
    edges
}

fn node_min_core(tree: &BallTree<'_>, core_sq: &[f64]) -> Vec<f64> {
    tree.nodes
        .iter()
        .map(|node| {
            tree.order[node.start..node.end]
                .iter()
                .map(|&p| core_sq[p])
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Marks nodes whose points all share one component. Children always follow
/// their parent in `tree.nodes`, so a reverse sweep sees children first.
fn label_nodes(tree: &BallTree<'_>, comp: &[usize], node_comp: &mut [usize]) {
    for idx in (0..tree.nodes.len()).rev() {
        let node = &tree.nodes[idx];
        node_comp[idx] = match node.children {
            Some((l, r)) => {
                if node_comp[l] != MIXED && node_comp[l] == node_comp[r] {
                    node_comp[l]
                } else {
                    MIXED
                }
            }
            None => {
                let pts = &tree.order[node.start..node.end];
                let first = comp[pts[0]];
                if pts.iter().all(|&p| comp[p] == first) {
                    first
                } else {
                    MIXED
                }
            }
        };
    }
}

#[inline]
fn improves(cand: Key, best: &Option<Key>) -> bool {
    best.map_or(true, |b| key_cmp(cand, b) == Ordering::Less)
}

#[allow(clippy::too_many_arguments)]
fn component_search<E: DistanceEngine>(
    engine: &E,
    tree: &BallTree<'_>,
    core_sq: &[f64],
    neighbors: &NeighborLists,
    node_min_core: &[f64],
    comp: &[usize],
    node_comp: &[usize],
    c: usize,
    q: usize,
    best: &mut Option<Key>,
) {
    let cq = core_sq[q];
    if let Some(b) = best {
        if cq > b.0 {
            return;
        }
    }
    let points = tree.points;
    let qr = points.row(q);

    // Neighbours within the core radius reach q at exactly max(core_q, core_p).
    let mut at_floor = false;
    for &p in neighbors.of(q) {
        if comp[p] == c {
            continue;
        }
        let w2 = mreach_sq(core_sq, q, p, engine.squared(qr, points.row(p)));
        if w2 == cq {
            at_floor = true;
        }
        let cand = key(w2, q, p);
        if improves(cand, best) {
            *best = Some(cand);
        }
    }
    // Every point outside a complete list is strictly farther than core_q.
    if at_floor && neighbors.complete[q] {
        return;
    }

    let mut stack: Vec<(f64, usize)> = vec![(0.0, 0)];
    while let Some((lb_sq, node)) = stack.pop() {
        if node_comp[node] == c {
            continue;
        }
        let info = &tree.nodes[node];
        if let Some(b) = best {
            if key_cmp(key(lb_sq, q, info.min_index), *b) == Ordering::Greater {
                continue;
            }
        }
        match info.children {
            None => {
                for pos in info.start..info.end {
                    let p = tree.order[pos];
                    if comp[p] == c {
                        continue;
                    }
                    let floor = cq.max(core_sq[p]);
                    if let Some(b) = best {
                        if floor > b.0 {
                            continue;
                        }
                    }
                    let w2 = mreach_sq(core_sq, q, p, engine.squared(qr, tree.row_at(pos)));
                    let cand = key(w2, q, p);
                    if improves(cand, best) {
                        *best = Some(cand);
                    }
                }
            }
            Some((l, r)) => {
                let bound = |child: usize| {
                    let d = tree.lower_bound(engine, qr, child);
                    (d * d).max(cq).max(node_min_core[child])
                };
                let (bl, br) = (bound(l), bound(r));
                if bl <= br {
                    stack.push((br, r));
                    stack.push((bl, l));
                } else {
                    stack.push((bl, l));
                    stack.push((br, r));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::distance::Unrolled;
    use crate::cluster::hdbscan::core_distance::{brute_core_sq, tree_core_sq};

    fn scatter(n: usize, dims: usize, seed: u64) -> PointSet {
        let mut s = seed;
        let data = (0..n * dims)
            .map(|_| {
                s = s.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
                ((s >> 33) % 1000) as f64 / 37.0
            })
            .collect();
        PointSet::new(n, dims, data).unwrap()
    }

    #[test]
    fn prim_and_boruvka_agree() {
        for (n, dims, k) in [(200, 2, 1), (300, 3, 5), (500, 4, 10), (150, 2, 3)] {
            let p = scatter(n, dims, n as u64);
            let tree = BallTree::build(&Unrolled, &p);
            let (core, lists) = tree_core_sq(&Unrolled, &tree, k);
            assert_eq!(core, brute_core_sq(&Unrolled, &p, k));
            let a = prim(&Unrolled, &p, &core);
            let b = boruvka(&Unrolled, &tree, &core, &lists);
            assert_eq!(a.len(), n - 1);
            assert_eq!(a, b, "n={n} dims={dims} k={k}");
        }
    }

    #[test]
    fn duplicate_points_are_handled() {
        let p = PointSet::new(6, 1, vec![1.0, 1.0, 1.0, 2.0, 2.0, 5.0]).unwrap();
        let tree = BallTree::build(&Unrolled, &p);
        let (core, lists) = tree_core_sq(&Unrolled, &tree, 2);
        let a = prim(&Unrolled, &p, &core);
        let b = boruvka(&Unrolled, &tree, &core, &lists);
        assert_eq!(a, b);
        let total: f64 = a.iter().map(|e| e.weight).sum();
        assert_eq!(total, 0.0 + 0.0 + 1.0 + 0.0 + 3.0);
    }

    #[test]
    fn union_find_joins() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert_eq!(uf.find(0), uf.find(2));
    }
}
