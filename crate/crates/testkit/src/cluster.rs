//! Clustering oracles: dense mutual reachability, agglomerative single
//! linkage, exhaustive cluster selection, exhaustive k-means.

/// Squared distance summed left to right.
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

/// Squared core distances; the point itself is its own first neighbour.
pub fn core_sq(points: &[Vec<f64>], min_samples: usize) -> Vec<f64> {
    let n = points.len();
    let k = min_samples.min(n).max(1);
    (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n).map(|j| sq_dist(&points[i], &points[j])).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[k - 1]
        })
        .collect()
}

/// Dense squared mutual-reachability matrix.
pub fn mreach_sq(points: &[Vec<f64>], min_samples: usize) -> Vec<Vec<f64>> {
    let core = core_sq(points, min_samples);
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[i][j] = sq_dist(&points[i], &points[j]).max(core[i]).max(core[j]);
            }
        }
    }
    m
}

/// Edge weights (not squared) of a minimum spanning tree, ascending.
pub fn mst_weights(points: &[Vec<f64>], min_samples: usize) -> Vec<f64> {
    let m = mreach_sq(points, min_samples);
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    dist[0] = 0.0;
    for step in 0..n {
        let mut v = usize::MAX;
        for j in 0..n {
            if !in_tree[j] && (v == usize::MAX || dist[j] < dist[v]) {
                v = j;
            }
        }
        in_tree[v] = true;
        if step > 0 {
            out.push(dist[v].sqrt());
        }
        for j in 0..n {
            if !in_tree[j] && m[v][j] < dist[j] {
                dist[j] = m[v][j];
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[derive(Debug, Clone)]
struct Merge {
    members: Vec<usize>,
    dist: f64,
    children: Option<(usize, usize)>,
}

/// Merges the pair of groups joined by the smallest edge, comparing edges by
/// `(weight, smaller endpoint, larger endpoint)`.
fn agglomerate(points: &[Vec<f64>], min_samples: usize) -> (Vec<Merge>, usize) {
    let m = mreach_sq(points, min_samples);
    let n = points.len();
    let mut nodes: Vec<Merge> = (0..n)
        .map(|i| Merge {
            members: vec![i],
            dist: 0.0,
            children: None,
        })
        .collect();
    let mut group_of: Vec<usize> = (0..n).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    while alive.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                if group_of[i] == group_of[j] {
                    continue;
                }
                let key = (m[i][j], i, j);
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (w, i, j) = best.unwrap();
        let (gi, gj) = (group_of[i], group_of[j]);
        let mut members = nodes[gi].members.clone();
        members.extend(&nodes[gj].members);
        members.sort_unstable();
        let id = nodes.len();
        nodes.push(Merge {
            members: members.clone(),
            dist: w.sqrt(),
            children: Some((gi, gj)),
        });
        for &p in &members {
            group_of[p] = id;
        }
        alive.retain(|&g| g != gi && g != gj);
        alive.push(id);
    }
    let root = alive.first().copied().unwrap_or(0);
    (nodes, root)
}

#[derive(Debug, Clone)]
struct Cluster {
    members: Vec<usize>,
    birth: f64,
    stability: f64,
    children: Vec<usize>,
}

struct Condenser<'a> {
    nodes: &'a [Merge],
    mcs: usize,
    zero_lambda: f64,
    clusters: Vec<Cluster>,
}

impl Condenser<'_> {
    fn lambda(&self, d: f64) -> f64 {
        if d > 0.0 {
            1.0 / d
        } else {
            self.zero_lambda
        }
    }

    /// Follows `node` down while it stays one cluster, crediting stability
    /// to `cluster` for every point that leaves.
    fn descend(&mut self, node: usize, cluster: usize) {
        let Some((a, b)) = self.nodes[node].children else {
            return;
        };
        let lam = self.lambda(self.nodes[node].dist);
        let birth = self.clusters[cluster].birth;
        let (sa, sb) = (self.nodes[a].members.len(), self.nodes[b].members.len());
        if sa >= self.mcs && sb >= self.mcs {
            for child in [a, b] {
                let size = self.nodes[child].members.len();
                self.clusters[cluster].stability += (lam - birth) * size as f64;
                let id = self.clusters.len();
                self.clusters.push(Cluster {
                    members: self.nodes[child].members.clone(),
                    birth: lam,
                    stability: 0.0,
                    children: vec![],
                });
                self.clusters[cluster].children.push(id);
                self.descend(child, id);
            }
        } else {
            for (child, size) in [(a, sa), (b, sb)] {
                if size >= self.mcs {
                    self.descend(child, cluster);
                } else {
                    self.clusters[cluster].stability += (lam - birth) * size as f64;
                }
            }
        }
    }
}

/// All ways to pick clusters from the subtree of `c` with no two nested.
fn choices(clusters: &[Cluster], c: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![c]];
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for &k in &clusters[c].children {
        let sub = choices(clusters, k);
        let mut next = Vec::new();
        for base in &combos {
            for s in &sub {
                let mut v = base.clone();
                v.extend(s);
                next.push(v);
            }
        }
        combos = next;
    }
    if !clusters[c].children.is_empty() {
        out.extend(combos);
    }
    out
}

/// HDBSCAN labels by exhaustive search for the most stable set of
/// non-nested, non-root clusters. Ties go to the selection with fewer
/// clusters. Noise is -1; other labels are the rank of the cluster's
/// smallest member.
pub fn brute_hdbscan(points: &[Vec<f64>], min_cluster_size: usize, min_samples: usize) -> Vec<i64> {
    let n = points.len();
    let (nodes, root) = agglomerate(points, min_samples);
    let min_pos = nodes.iter().map(|m| m.dist).filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min);
    let zero_lambda = if min_pos.is_finite() { 1.0 / min_pos } else { 1.0 };
    let mut cd = Condenser {
        nodes: &nodes,
        mcs: min_cluster_size,
        zero_lambda,
        clusters: vec![Cluster {
            members: (0..n).collect(),
            birth: 0.0,
            stability: 0.0,
            children: vec![],
        }],
    };
    cd.descend(root, 0);
    let clusters = cd.clusters;

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut options: Vec<Vec<usize>> = vec![vec![]];
    for &k in &clusters[0].children {
        let sub = choices(&clusters, k);
        let mut next = Vec::new();
        for base in &options {
            for s in &sub {
                let mut v = base.clone();
                v.extend(s);
                next.push(v);
            }
        }
        options = next;
    }
    for sel in options {
        let total: f64 = sel.iter().map(|&c| clusters[c].stability).sum();
        let take = match &best {
            None => true,
            Some((bt, bs)) => {
                let eps = 1e-9 * bt.abs().max(1.0);
                total > bt + eps || ((total - bt).abs() <= eps && sel.len() < bs.len())
            }
        };
        if take {
            best = Some((total, sel));
        }
    }
    let chosen = best.map(|b| b.1).unwrap_or_default();
    let mut firsts: Vec<(usize, usize)> = chosen.iter().map(|&c| (clusters[c].members[0], c)).collect();
    firsts.sort_unstable();
    let mut labels = vec![-1i64; n];
    for (rank, &(_, c)) in firsts.iter().enumerate() {
        for &p in &clusters[c].members {
            labels[p] = rank as i64;
        }
    }
    labels
}

/// Smallest within-cluster sum of squares over every assignment of the
/// 1-d points to `k` labels.
pub fn kmeans_optimum_1d(xs: &[f64], k: usize) -> f64 {
    let n = xs.len();
    let mut assign = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut sum = vec![0.0; k];
        let mut cnt = vec![0usize; k];
        for (i, &a) in assign.iter().enumerate() {
            sum[a] += xs[i];
            cnt[a] += 1;
        }
        let inertia: f64 = assign
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let m = sum[a] / cnt[a] as f64;
                (xs[i] - m) * (xs[i] - m)
            })
            .sum();
        best = best.min(inertia);
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}
