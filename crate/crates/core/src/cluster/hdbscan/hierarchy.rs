//! Single-linkage dendrogram, condensed tree, excess-of-mass selection and
//! GLOSH outlier scores.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::mst::{MstEdge, UnionFind};

/// One merge of the dendrogram. Node ids below `n` are points; row `r`
/// creates node `n + r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkageRow {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Kruskal over MST edges already sorted by key.
pub fn single_linkage(n: usize, edges: &[MstEdge]) -> Vec<LinkageRow> {
    let mut uf = UnionFind::new(n);
    // Dendrogram node currently standing for each union-find root.
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut rows = Vec::with_capacity(edges.len());
    for e in edges {
        let (ra, rb) = (uf.find(e.a), uf.find(e.b));
        debug_assert_ne!(ra, rb, "MST edges cannot close a cycle");
        let merged = size[ra] + size[rb];
        rows.push(LinkageRow {
            left: node_of[ra],
            right: node_of[rb],
            distance: e.weight,
            size: merged,
        });
        uf.union(ra, rb);
        let root = uf.find(ra);
        node_of[root] = n + rows.len() - 1;
        size[root] = merged;
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CondensedChild {
    Point(usize),
    Cluster(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CondensedRow {
    pub parent: usize,
    pub child: CondensedChild,
    /// Density level (inverse distance) at which the child leaves the parent.
    pub lambda: f64,
    pub size: usize,
}

/// Cluster 0 is the root; every other cluster id is larger than its parent's.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CondensedTree {
    pub rows: Vec<CondensedRow>,
    pub n_clusters: usize,
    pub n_points: usize,
}

impl CondensedTree {
    /// Parent of every cluster (`None` for the root).
    pub fn cluster_parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.n_clusters];
        for row in &self.rows {
            if let CondensedChild::Cluster(c) = row.child {
                parent[c] = Some(row.parent);
            }
        }
        parent
    }

    /// Density at which each cluster appears (0 for the root).
    pub fn birth_lambdas(&self) -> Vec<f64> {
        let mut birth = vec![0.0; self.n_clusters];
        for row in &self.rows {
            if let CondensedChild::Cluster(c) = row.child {
                birth[c] = row.lambda;
            }
        }
        birth
    }

    pub fn stabilities(&self) -> Vec<f64> {
        let birth = self.birth_lambdas();
        let mut stab = vec![0.0; self.n_clusters];
        for row in &self.rows {
            stab[row.parent] += (row.lambda - birth[row.parent]) * row.size as f64;
        }
        stab
    }
}

/// Inverse distance. Zero-distance merges are given the largest finite
/// density in the dendrogram, or 1 when every merge is at distance zero.
fn lambda_map(rows: &[LinkageRow]) -> impl Fn(f64) -> f64 {
    let min_positive = rows
        .iter()
        .map(|r| r.distance)
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let zero = if min_positive.is_finite() { 1.0 / min_positive } else { 1.0 };
    move |d: f64| if d > 0.0 { 1.0 / d } else { zero }
}

pub fn condense(n: usize, rows: &[LinkageRow], min_cluster_size: usize) -> CondensedTree {
    let mut out = Vec::new();
    if n == 0 {
        return CondensedTree { rows: out, n_clusters: 0, n_points: 0 };
    }
    if rows.is_empty() {
        return CondensedTree { rows: out, n_clusters: 1, n_points: n };
    }
    let lambda = lambda_map(rows);
    let size_of = |node: usize| if node < n { 1 } else { rows[node - n].size };
    let points_under = |node: usize, sink: &mut Vec<usize>| {
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < n {
                sink.push(x);
            } else {
                let r = &rows[x - n];
                stack.push(r.right);
                stack.push(r.left);
            }
        }
    };

    let mut next_cluster = 1usize;
    let mut queue = VecDeque::from([(n + rows.len() - 1, 0usize)]);
    let mut scratch = Vec::new();
    while let Some((node, cluster)) = queue.pop_front() {
        if node < n {
            continue;
        }
        let row = rows[node - n];
        let lam = lambda(row.distance);
        let (ls, rs) = (size_of(row.left), size_of(row.right));
        let (l_big, r_big) = (ls >= min_cluster_size, rs >= min_cluster_size);
        if l_big && r_big {
            for (child, size) in [(row.left, ls), (row.right, rs)] {
                let id = next_cluster;
                next_cluster += 1;
                out.push(CondensedRow {
                    parent: cluster,
                    child: CondensedChild::Cluster(id),
                    lambda: lam,
                    size,
                });
                queue.push_back((child, id));
            }
            continue;
        }
        for (child, big) in [(row.left, l_big), (row.right, r_big)] {
            if big {
                queue.push_back((child, cluster));
            } else {
                scratch.clear();
                points_under(child, &mut scratch);
                out.extend(scratch.iter().map(|&p| CondensedRow {
                    parent: cluster,
                    child: CondensedChild::Point(p),
                    lambda: lam,
                    size: 1,
                }));
            }
        }
    }
    CondensedTree {
        rows: out,
        n_clusters: next_cluster,
        n_points: n,
    }
}

/// Excess-of-mass selection. The root is never selected; a cluster gives way
/// to its descendants only when their combined stability is strictly larger.
pub fn select_eom(tree: &CondensedTree) -> Vec<bool> {
    let m = tree.n_clusters;
    let mut selected = vec![false; m];
    if m <= 1 {
        return selected;
    }
    let stab = tree.stabilities();
    let parent = tree.cluster_parents();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); m];
    for c in 1..m {
        if let Some(p) = parent[c] {
            children[p].push(c);
        }
    }
    let mut best = stab.clone();
    for c in (1..m).rev() {
        if children[c].is_empty() {
            selected[c] = true;
            continue;
        }
        let below: f64 = children[c].iter().map(|&k| best[k]).sum();
        if below > stab[c] {
            best[c] = below;
        } else {
            selected[c] = true;
            let mut stack = children[c].clone();
            while let Some(d) = stack.pop() {
                selected[d] = false;
                stack.extend_from_slice(&children[d]);
            }
        }
    }
    selected
}

/// Per-point labels (selected cluster id, or `None` for noise), and GLOSH scores.
pub fn label_points(tree: &CondensedTree, selected: &[bool]) -> (Vec<Option<usize>>, Vec<f64>) {
    let n = tree.n_points;
    let m = tree.n_clusters;
    let parent = tree.cluster_parents();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for c in 0..m {
        owner[c] = if selected[c] {
            Some(c)
        } else {
            parent[c].and_then(|p| owner[p])
        };
    }

    let mut point_parent = vec![0usize; n];
    let mut point_lambda = vec![0.0; n];
    let mut max_lambda = vec![0.0f64; m];
    for row in &tree.rows {
        if let CondensedChild::Point(p) = row.child {
            point_parent[p] = row.parent;
            point_lambda[p] = row.lambda;
            max_lambda[row.parent] = max_lambda[row.parent].max(row.lambda);
        }
    }
    for c in (1..m).rev() {
        if let Some(p) = parent[c] {
            max_lambda[p] = max_lambda[p].max(max_lambda[c]);
        }
    }

    let labels = (0..n).map(|p| owner.get(point_parent[p]).copied().flatten()).collect();
    let scores = (0..n)
        .map(|p| {
            let top = max_lambda.get(point_parent[p]).copied().unwrap_or(0.0);
            if top > 0.0 {
                (top - point_lambda[p]) / top
            } else {
                0.0
            }
        })
        .collect();
    (labels, scores)
}
