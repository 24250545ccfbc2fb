//! Acceptance checks. Prints one line per criterion and exits non-zero if any
//! of them fails. The KTC check runs only when `TRACKMINE_KTC_DIR` points at
//! a native-layout copy of the released data.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use trackmine::{Adapter, NativeAdapter};
use trackmine_core::cluster::hdbscan::hdbscan_fit_points;
use trackmine_core::cluster::kmeans::kmeans_fit_points;
use trackmine_core::cluster::{
    hdbscan_fit, kmeans_fit, HdbscanConfig, KMeansConfig, PointSet, Sequential, Unrolled, NOISE,
};
use trackmine_core::embedding::{pca_fit, pca_fit_with, pca_transform, summarize_matrix, SummaryMode};
use trackmine_core::eval::{ami, ami_with, distribution_report, exclusion_order, outlier_curve, AmiNormalization, LabeledEvalSet};
use trackmine_core::merge::{merge_tracklets, MergeConfig, SelectionTimeline, TrackletStore};
use trackmine_core::synthetic::{generate_collection, SyntheticCollection, SyntheticSpec};
use trackmine_core::{
    AnnotatedTrack, BoundingBox, ClusteringResult, EmbeddingMatrix, FrameObservation, MaskGeometry, RleMask, Track,
    TrackId, TrackLabel, Tracklet, TrackletId,
};
use trackmine_testkit::cluster::{brute_hdbscan, kmeans_optimum_1d, mst_weights};
use trackmine_testkit::geometry::Geom;
use trackmine_testkit::merge::{brute_merge, random_instance, OTracklet};
use trackmine_testkit::Lcg;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(pass: bool, detail: String) -> Outcome {
    if pass {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

// 1. Merging against the brute-force merger.

fn geometry(g: &Geom) -> MaskGeometry {
    match g {
        Geom::Rle { w, h, runs } => MaskGeometry::Rle(RleMask::new(*w, *h, runs.clone())),
        Geom::Box { x, y, w, h } => MaskGeometry::Box(BoundingBox::new(*x, *y, *w, *h)),
    }
}

fn tracklet(t: &OTracklet) -> Tracklet {
    Tracklet::new(
        TrackletId(t.id),
        t.frames.iter().map(|(f, g)| FrameObservation::new(*f, geometry(g))).collect(),
    )
}

fn merge_oracle() -> Outcome {
    let mut rng = Lcg::new(2024);
    let cases: Vec<_> = (0..500).map(|_| random_instance(&mut rng, 20, 50)).collect();
    let (mut rle, mut boxes) = (0usize, 0usize);
    for (ts, _) in &cases {
        for t in ts {
            for (_, g) in &t.frames {
                match g {
                    Geom::Rle { .. } => rle += 1,
                    Geom::Box { .. } => boxes += 1,
                }
            }
        }
    }
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut junctions = 0;
    for (case, (tracklets, timeline)) in cases.iter().enumerate() {
        let gamma = [0.3, 0.5, 0.7][case % 3];
        let lambda_min = [0.2, 0.5, 0.8][(case / 3) % 3];
        let store = TrackletStore::new(tracklets.iter().map(tracklet).collect()).unwrap();
        let mut tl = SelectionTimeline::new();
        for (&f, ids) in timeline {
            tl.set_frame(f, ids.iter().map(|&i| TrackletId(i)).collect());
        }
        let got = merge_tracklets(&store, &tl, &MergeConfig::new(gamma, lambda_min).unwrap()).unwrap();
        let want = brute_merge(tracklets, timeline, gamma, lambda_min);
        let same = got.len() == want.len()
            && got.iter().zip(&want).all(|(g, w)| {
                let ids: Vec<u64> = g.tracklet_ids.iter().map(|i| i.0).collect();
                ids == w.tracklets
                    && g.junctions.len() == w.lambdas.len()
                    && g.junctions.iter().zip(&w.lambdas).all(|(j, l)| (j.lambda - l).abs() <= 1e-12)
            });
        junctions += want.iter().map(|w| w.lambdas.len()).sum::<usize>();
        if !same {
            mismatches.push(case);
        }
    }
    let t = start.elapsed();
    verdict(
        mismatches.is_empty() && t < Duration::from_secs(10) && rle > 0 && boxes > 0,
        format!(
            "500 instances ({rle} RLE / {boxes} box observations, {junctions} junctions), {} mismatches {:?}, {:.2} s (< 10 s)",
            mismatches.len(),
            &mismatches[..mismatches.len().min(5)],
            secs(t)
        ),
    )
}

// 2. AMI against the permutation-model oracle.

fn ami_oracle() -> Outcome {
    let mut rng = Lcg::new(77);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = 1 + rng.below(10) as usize;
        let (ka, kb) = (1 + rng.below(5), 1 + rng.below(5));
        let truth: Vec<usize> = (0..n).map(|_| rng.below(ka) as usize).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.below(kb) as usize).collect();
        for (norm, max) in [(AmiNormalization::Arithmetic, false), (AmiNormalization::Max, true)] {
            let got = ami_with(&truth, &pred, norm).unwrap();
            let want = trackmine_testkit::ami::ami(&truth, &pred, max);
            worst = worst.max((got - want).abs());
        }
    }
    let mut identity_ok = true;
    let mut single_ok = true;
    for _ in 0..50 {
        let n = 2 + rng.below(9) as usize;
        let k = 2 + rng.below(4);
        let mut truth: Vec<u64> = (0..n).map(|_| rng.below(k)).collect();
        truth[0] = 0;
        truth[1] = 1;
        let renamed: Vec<u64> = truth.iter().map(|t| t * 7 + 3).collect();
        identity_ok &= ami(&truth, &truth).unwrap() == 1.0 && ami(&truth, &renamed).unwrap() == 1.0;
        single_ok &= ami(&truth, &vec![0u64; n]).unwrap() == 0.0;
    }
    verdict(
        worst <= 1e-9 && identity_ok && single_ok,
        format!("200 cases, max |ami - oracle| = {worst:.2e} (<= 1e-9); identity exactly 1: {identity_ok}; single cluster exactly 0: {single_ok}"),
    )
}

// 3. HDBSCAN hierarchy and MST against brute force.

fn partition(labels: &[i64]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut noise = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if l < 0 {
            noise.push(i);
        } else {
            groups.entry(l).or_default().push(i);
        }
    }
    let mut parts: Vec<Vec<usize>> = groups.into_values().collect();
    parts.sort();
    (parts, noise)
}

fn point_set(points: &[Vec<f64>]) -> PointSet {
    let dims = points.first().map_or(0, Vec::len);
    PointSet::new(points.len(), dims, points.concat()).unwrap()
}

fn hdbscan_oracle() -> Outcome {
    let mut rng = Lcg::new(303);
    let mut hierarchy_bad = 0;
    for case in 0..300 {
        let n = 2 + rng.below(11) as usize;
        let pts: Vec<Vec<f64>> = if case % 2 == 0 {
            (0..n).map(|_| (0..2).map(|_| rng.below(6) as f64).collect()).collect()
        } else {
            (0..n).map(|_| (0..2).map(|_| rng.range(0.0, 10.0)).collect()).collect()
        };
        let mcs = 2 + rng.below(3) as usize;
        let ms = 1 + rng.below(4) as usize;
        let fit = hdbscan_fit_points(&Sequential, &point_set(&pts), &HdbscanConfig::new(mcs).with_min_samples(ms)).unwrap();
        let got: Vec<i64> = fit.result.assignments.iter().map(|&l| l as i64).collect();
        if partition(&got) != partition(&brute_hdbscan(&pts, mcs, ms)) {
            hierarchy_bad += 1;
        }
    }
    let mut mst_bad = 0;
    let mut worst_default = 0.0f64;
    for case in 0..30 {
        let n = 20 + rng.below(181) as usize;
        let dims = 1 + rng.below(4) as usize;
        let pts: Vec<Vec<f64>> = if case % 2 == 0 {
            (0..n).map(|_| (0..dims).map(|_| rng.below(8) as f64).collect()).collect()
        } else {
            (0..n).map(|_| (0..dims).map(|_| rng.range(0.0, 10.0)).collect()).collect()
        };
        let ms = 1 + rng.below(6) as usize;
        let want = mst_weights(&pts, ms);
        let total: f64 = want.iter().sum();
        let cfg = HdbscanConfig::new(5).with_min_samples(ms);
        let exact = hdbscan_fit_points(&Sequential, &point_set(&pts), &cfg).unwrap();
        let mut got: Vec<f64> = exact.mst.iter().map(|e| e.weight).collect();
        got.sort_by(f64::total_cmp);
        if got != want || exact.mst_weight() != got.iter().sum::<f64>() {
            mst_bad += 1;
        }
        let fast = hdbscan_fit_points(&Unrolled, &point_set(&pts), &cfg).unwrap();
        worst_default = worst_default.max((fast.mst_weight() - total).abs() / total.max(1.0));
    }
    verdict(
        hierarchy_bad == 0 && mst_bad == 0 && worst_default <= 1e-12,
        format!(
            "300 hierarchies, {hierarchy_bad} mismatches; 30 MSTs (20..200 points), {mst_bad} weight mismatches with the sequential kernel, default kernel within {worst_default:.1e} relative"
        ),
    )
}

// 4. KMeans against the exhaustive 1-d optimum.

fn kmeans_oracle() -> Outcome {
    let mut rng = Lcg::new(404);
    let mut hits = 0;
    let mut misses = Vec::new();
    for case in 0..100 {
        let n = 3 + rng.below(10) as usize;
        let k = 1 + rng.below(3) as usize;
        let xs: Vec<f64> = (0..n).map(|_| rng.range(-10.0, 10.0)).collect();
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let cfg = KMeansConfig::new(k).with_n_init(50).with_seed(case);
        let fit = kmeans_fit_points(&Unrolled, &point_set(&pts), &cfg).unwrap();
        let best = kmeans_optimum_1d(&xs, k);
        if (fit.inertia - best).abs() <= 1e-9 {
            hits += 1;
        } else {
            misses.push(format!("case {case} n={n} k={k}: {:.6} vs {:.6}", fit.inertia, best));
        }
    }
    let mut detail = format!("{hits}/100 at the exhaustive optimum (>= 95)");
    if !misses.is_empty() {
        detail += &format!("; misses: {}", misses.join(", "));
    }
    verdict(hits >= 95, detail)
}

// 5 and 6. Spec-scale synthetic collections.

fn spec_scale(outlier_fraction: f64) -> SyntheticSpec {
    SyntheticSpec {
        n_categories: 36,
        zipf_exponent: 1.1,
        n_tracks: 12_000,
        embedding_dims: 50,
        cluster_spread: 1.0,
        center_separation: 100.0,
        outlier_fraction,
        tracking_error_fraction: 0.0,
        seed: 12,
        ..SyntheticSpec::default()
    }
}

fn track_embeddings(col: &SyntheticCollection) -> EmbeddingMatrix {
    summarize_matrix(&col.crops, SummaryMode::ClosestToMean).unwrap().embeddings
}

fn separable_recovery() -> Outcome {
    let spec = spec_scale(0.0);
    let col = generate_collection(&spec).unwrap();
    let start = Instant::now();
    let tracks = track_embeddings(&col);
    let fit = hdbscan_fit(&tracks, &HdbscanConfig::new(30)).unwrap();
    let t = start.elapsed();

    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &col.truth.category {
        *sizes.entry(c).or_insert(0) += 1;
    }
    let big: Vec<usize> = (0..tracks.rows()).filter(|&i| sizes[&col.truth.category[i]] >= 30).collect();
    let small = tracks.rows() - big.len();
    let truth: Vec<usize> = big.iter().map(|&i| col.truth.category[i]).collect();
    let pred: Vec<i32> = big.iter().map(|&i| fit.result.assignments[i]).collect();
    let score = ami(&truth, &pred).unwrap();
    let small_noise = (0..tracks.rows())
        .filter(|&i| sizes[&col.truth.category[i]] < 30 && fit.result.assignments[i] == NOISE)
        .count();
    let big_categories = sizes.values().filter(|&&s| s >= 30).count();
    verdict(
        score >= 0.99 && small_noise == small && t < Duration::from_secs(60),
        format!(
            "12,000 tracks from {} crops, {} clusters for {big_categories} categories with >= 30 members, AMI {score:.6} (>= 0.99), {small_noise}/{small} small-category tracks in noise, {} noise overall, summarize + HDBSCAN {:.1} s (< 60 s)",
            col.crops.rows(),
            fit.result.n_clusters,
            fit.result.noise_count(),
            secs(t)
        ),
    )
}

struct OutlierCheck {
    ami0: f64,
    ami10: f64,
    caught: usize,
    planted: usize,
}

impl OutlierCheck {
    fn new(result: &ClusteringResult, col: &SyntheticCollection, ids: &[String]) -> Self {
        let truth: Vec<String> = col.truth.category.iter().map(|&c| col.truth.category_names[c].clone()).collect();
        let set = LabeledEvalSet::new(
            ids.to_vec(),
            truth,
            result.assignments.clone(),
            result.outlier_scores.clone(),
            result.marks_noise(),
        )
        .unwrap();
        let curve = outlier_curve(&set, &[0.0, 0.1]).unwrap();
        let cut = (0.1 * set.len() as f64).ceil() as usize;
        let caught = exclusion_order(&set)[..cut].iter().filter(|&&i| col.truth.outlier[i]).count();
        Self {
            ami0: curve.points[0].ami.unwrap(),
            ami10: curve.points[1].ami.unwrap(),
            caught,
            planted: col.truth.outlier.iter().filter(|&&o| o).count(),
        }
    }

    fn pass(&self) -> bool {
        self.ami10 > self.ami0 && self.caught as f64 >= 0.95 * self.planted as f64
    }

    fn describe(&self, name: &str) -> String {
        format!(
            "{name}: AMI {:.4} at 0 -> {:.4} at 0.1 ({}), caught {}/{} ({:.1}%, needs >= 95%)",
            self.ami0,
            self.ami10,
            if self.ami10 > self.ami0 { "rises" } else { "does not rise" },
            self.caught,
            self.planted,
            100.0 * self.caught as f64 / self.planted as f64
        )
    }
}

fn outlier_curve_behaviour() -> Outcome {
    let spec = spec_scale(0.1);
    let col = generate_collection(&spec).unwrap();
    let tracks = track_embeddings(&col);
    let ids = tracks.row_ids().to_vec();
    let km = kmeans_fit(&tracks, &KMeansConfig::new(36).with_seed(1)).unwrap();
    let hd = hdbscan_fit(&tracks, &HdbscanConfig::new(30)).unwrap();
    let k = OutlierCheck::new(&km.result, &col, &ids);
    let h = OutlierCheck::new(&hd.result, &col, &ids);
    verdict(k.pass() && h.pass(), format!("{}; {}", k.describe("KMeans k=36"), h.describe("HDBSCAN mcs=30")))
}

// 7. PCA on a planted subspace.

fn pca_fidelity() -> Outcome {
    let (rows, dims, rank) = (2000, 1536, 50);
    let mut rng = Lcg::new(1536);
    let basis: Vec<f64> = (0..rank * dims).map(|_| rng.normal() / (dims as f64).sqrt()).collect();
    let offset: Vec<f64> = (0..dims).map(|_| rng.range(-1.0, 1.0)).collect();
    let mut data = Vec::with_capacity(rows * dims);
    for _ in 0..rows {
        let z: Vec<f64> = (0..rank).map(|_| rng.normal() * 3.0).collect();
        for d in 0..dims {
            data.push(offset[d] + (0..rank).map(|r| z[r] * basis[r * dims + d]).sum::<f64>());
        }
    }
    let start = Instant::now();
    let model = pca_fit_with(&data, rows, dims, rank).unwrap();
    let t = start.elapsed();

    let project = |row: &[f64]| -> Vec<f64> {
        (0..rank)
            .map(|c| model.component(c).iter().zip(row.iter().zip(&model.mean)).map(|(w, (x, m))| w * (x - m)).sum())
            .collect()
    };
    let projected: Vec<Vec<f64>> = data.chunks_exact(dims).map(project).collect();
    let mut err = 0.0;
    for (row, z) in data.chunks_exact(dims).zip(&projected) {
        let back = model.reconstruct(z);
        err += back.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    }
    err /= rows as f64;

    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let sample = 400;
    let mut distortion = 0.0f64;
    for i in 0..sample {
        for j in 0..i {
            let d = dist(&data[i * dims..(i + 1) * dims], &data[j * dims..(j + 1) * dims]);
            distortion = distortion.max((dist(&projected[i], &projected[j]) - d).abs() / d);
        }
    }

    // The same data through the f32 file path.
    let m = EmbeddingMatrix::new(
        rows,
        dims,
        data.iter().map(|&v| v as f32).collect(),
        (0..rows).map(|i| i.to_string()).collect(),
    )
    .unwrap();
    let reduced = pca_transform(&pca_fit(&m, rank).unwrap(), &m).unwrap();
    let mut distortion32 = 0.0f64;
    for i in 0..sample {
        for j in 0..i {
            let a: Vec<f64> = m.row(i).iter().map(|&v| v as f64).collect();
            let b: Vec<f64> = m.row(j).iter().map(|&v| v as f64).collect();
            let d = dist(&a, &b);
            let za: Vec<f64> = reduced.row(i).iter().map(|&v| v as f64).collect();
            let zb: Vec<f64> = reduced.row(j).iter().map(|&v| v as f64).collect();
            distortion32 = distortion32.max((dist(&za, &zb) - d).abs() / d);
        }
    }
    verdict(
        err < 1e-4 && distortion < 0.01 && distortion32 < 0.01,
        format!(
            "{rows} x {dims} -> {rank}: mean reconstruction error {err:.2e} (< 1e-4), max pairwise distortion {:.2e}% (< 1%), {:.2e}% through f32 files, fit {:.1} s",
            100.0 * distortion,
            100.0 * distortion32,
            secs(t)
        ),
    )
}

// 8. Scale.

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn scale() -> Outcome {
    let spec = SyntheticSpec {
        n_tracks: 100_000,
        crops_per_track: (1, 1),
        seed: 1,
        ..SyntheticSpec::default()
    };
    let data = generate_collection(&spec).unwrap().crops;
    let start = Instant::now();
    let hd = hdbscan_fit(&data, &HdbscanConfig::new(30)).unwrap();
    let t_hd = start.elapsed();
    let start = Instant::now();
    let km = kmeans_fit(&data, &KMeansConfig::new(36).with_seed(1)).unwrap();
    let t_km = start.elapsed();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let peak = peak_rss_kib();
    let peak_gib = peak.map(|k| k as f64 / (1024.0 * 1024.0));
    verdict(
        t_hd < Duration::from_secs(600)
            && t_km < Duration::from_secs(60)
            && peak_gib.is_some_and(|g| g < 8.0)
            && km.result.len() == 100_000,
        format!(
            "{} x {}: HDBSCAN ({:?}) {:.1} s (< 600 s), {} clusters; KMeans k=36 {:.1} s (< 60 s); peak RSS {} (< 8 GiB); {threads} core(s)",
            data.rows(),
            data.dims(),
            hd.strategy,
            secs(t_hd),
            hd.result.n_clusters,
            secs(t_km),
            peak_gib.map_or("unavailable".to_string(), |g| format!("{g:.2} GiB")),
        ),
    )
}

// 9. CLI determinism.

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_trackmine"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn pipeline(root: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let s = |p: PathBuf| p.to_str().unwrap().to_string();
    let data = root.join("data");
    let out = root.join("out");
    std::fs::create_dir_all(&out).map_err(|e| e.to_string())?;
    let d = |n: &str| s(data.join(n));
    let o = |n: &str| s(out.join(n));
    cli(&[
        "simulate", "--seed", "9", "--categories", "8", "--tracks", "1500", "--dims", "16", "--known-categories", "4",
        "--outlier-fraction", "0.05", "--error-fraction", "0.05", "--max-crops", "10", "--fragmentation", "0.2",
        "--out", &s(data.clone()),
    ])?;
    cli(&["merge", "--tracklets", &d("tracklets.jsonl"), "--timeline", &d("timeline.jsonl"), "--out", &o("tracks.jsonl")])?;
    cli(&["summarize", "--crops", &d("crops.emb"), "--out", &o("tracks.emb")])?;
    cli(&["reduce", "--input", &o("tracks.emb"), "--dims", "8", "--model-out", &o("pca.json"), "--out", &o("reduced.emb")])?;
    cli(&["cluster", "--input", &o("reduced.emb"), "--algo", "hdbscan", "--min-cluster-size", "20", "--out", &o("hdbscan.csv")])?;
    cli(&["cluster", "--input", &o("reduced.emb"), "--algo", "kmeans", "--k", "8", "--seed", "4", "--out", &o("kmeans.csv")])?;
    for algo in ["hdbscan", "kmeans"] {
        cli(&[
            "evaluate", "--clusters", &o(&format!("{algo}.csv")), "--annotations", &d("annotations.csv"), "--out",
            &o(&format!("{algo}_curve.csv")),
        ])?;
    }
    cli(&[
        "report", "--annotations", &d("annotations.csv"), "--tracks", &o("tracks.jsonl"), "--clusters", &o("hdbscan.csv"),
        "--format", "json", "--out", &o("report.json"),
    ])?;
    cli(&["validate", &s(data.clone()), "--out", &o("validate.txt")])?;

    let mut files = BTreeMap::new();
    for dir in [&data, &out] {
        for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let name = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            files.insert(name, std::fs::read(&path).map_err(|e| e.to_string())?);
        }
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (fa, fb) = match (pipeline(a.path()), pipeline(b.path())) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Outcome::Fail(e),
    };
    let names: BTreeSet<&String> = fa.keys().chain(fb.keys()).collect();
    let differing: Vec<&str> = names
        .iter()
        .filter(|n| fa.get(n.as_str()) != fb.get(n.as_str()))
        .map(|n| n.as_str())
        .collect();
    let bytes: usize = fa.values().map(Vec::len).sum();
    verdict(
        differing.is_empty() && fa.len() == 18,
        format!("two full CLI runs, {} files ({bytes} bytes) compared, differing: {differing:?}", fa.len()),
    )
}

// 10. Released KTC data.

fn ktc() -> Outcome {
    let Some(dir) = std::env::var_os("TRACKMINE_KTC_DIR") else {
        return Outcome::Skip("TRACKMINE_KTC_DIR is not set; the released KTC data is not available here".into());
    };
    let dir = PathBuf::from(dir);
    let report = match trackmine::ingest_validate(&dir) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(format!("{}: {e}", dir.display())),
    };
    let ds = match NativeAdapter.load(&dir) {
        Ok(d) => d,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let annotated: Vec<AnnotatedTrack> = ds
        .annotations
        .unwrap_or_default()
        .into_iter()
        .map(|(id, annotation)| AnnotatedTrack {
            track: Track {
                id: TrackId(id.parse().unwrap_or(0)),
                tracklet_ids: Vec::new(),
                observations: Vec::new(),
                label: TrackLabel::Unknown,
                junctions: Vec::new(),
            },
            annotation,
        })
        .collect();
    let dist = distribution_report(&annotated, 30);
    let count = |name: &str| dist.counts.iter().find(|c| c.0 == name).map_or(0, |c| c.1);
    let heads = [("car", 2405), ("greenery", 1124), ("window", 370), ("person", 272)];
    let heads_ok = heads.iter().all(|&(n, c)| count(n) == c);
    let rate = report.error_rate.unwrap_or(f64::NAN);
    verdict(
        report.tracks_labeled == 8005 && report.tracking_errors == 745 && (rate * 1000.0).round() == 93.0 && heads_ok,
        format!(
            "{} labeled tracks (8005), {} tracking errors (745), rate {:.1}% (9.3%), heads {}",
            report.tracks_labeled,
            report.tracking_errors,
            100.0 * rate,
            heads.iter().map(|&(n, c)| format!("{n} {}/{c}", count(n))).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("merge matches the brute-force merger", merge_oracle),
        ("AMI matches the permutation-model oracle", ami_oracle),
        ("HDBSCAN matches the brute-force hierarchy and MST", hdbscan_oracle),
        ("KMeans reaches the exhaustive 1-d optimum", kmeans_oracle),
        ("separable synthetic categories are recovered", separable_recovery),
        ("planted outliers are ranked out and AMI rises", outlier_curve_behaviour),
        ("PCA reconstructs a planted 50-d subspace of 1536-d", pca_fidelity),
        ("100k x 50 clustering fits the time and memory budget", scale),
        ("CLI reruns are byte-identical", determinism),
        ("KTC counts and category heads", ktc),
    ];
    let only: Option<usize> = std::env::var("TRACKMINE_ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        let took = secs(start.elapsed());
        match outcome {
            Outcome::Pass(d) => println!("PASS {n:>2} {name}: {d} [{took:.1} s]"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {d} [{took:.1} s]");
            }
            Outcome::Skip(d) => println!("SKIP {n:>2} {name}: {d}"),
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
