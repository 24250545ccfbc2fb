//! The `trackmine` command line.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use trackmine_core::cluster::{hdbscan_fit, kmeans_fit, HdbscanConfig, KMeansConfig, NOISE};
use trackmine_core::embedding::{pca_fit, pca_transform, summarize_matrix, SummaryMode};
use trackmine_core::eval::{
    cluster_report, distribution_report, filter_annotations, fraction_grid, outlier_curve_with, AmiNormalization,
    CategoryDistribution, ClusterSummary, LabeledEvalSet,
};
use trackmine_core::merge::{compression_report, merge_tracklets, CompressionInput, MergeConfig, TrackletStore};
use trackmine_core::synthetic::{generate_collection, generate_tracklet_stream, SyntheticSpec};
use trackmine_core::{AnnotatedTrack, Annotation, ClusteringResult, Track, TrackId, TrackLabel};

use crate::error::{Error, Result};
use crate::formats::{
    read_annotations, read_clusters, read_embeddings, read_pca, read_timeline, read_tracklets, read_tracks,
    timeline_from, write_annotations, write_clusters, write_curve, write_embeddings, write_pca,
    write_timeline, write_tracklets, write_tracks, write_truth, ClusterTable, ReadMode, TrackRecord, TrackletRecord,
    TruthFile,
};
use crate::ingest::ingest_validate;

#[derive(Debug, Parser)]
#[command(name = "trackmine", version, about = "Object discovery from mined tracks")]
pub struct Cli {
    /// TOML file with flag defaults; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge tracklets into tracks along the selection timeline.
    Merge(MergeArgs),
    /// Reduce crop embeddings to one embedding per track.
    Summarize(SummarizeArgs),
    /// Project embeddings onto their leading principal components.
    Reduce(ReduceArgs),
    /// Cluster track embeddings.
    Cluster(ClusterArgs),
    /// AMI against annotations as a function of the excluded outlier fraction.
    Evaluate(EvaluateArgs),
    /// Write a synthetic long-tail dataset.
    Simulate(SimulateArgs),
    /// Category distribution and per-cluster summaries.
    Report(ReportArgs),
    /// Check a dataset directory and print its statistics.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(long)]
    pub tracklets: PathBuf,
    #[arg(long)]
    pub timeline: PathBuf,
    /// Mask IoU above which two masks of a frame match.
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Smallest overlap ratio that continues a track.
    #[arg(long, default_value_t = 0.5)]
    pub lambda_min: f64,
    /// Skip unreadable lines instead of failing.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    ClosestToMean,
    Mean,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Crop embeddings with row ids `<track>#<crop>`.
    #[arg(long)]
    pub crops: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::ClosestToMean)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub dims: usize,
    /// Apply this fitted model instead of fitting one.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Where to store the fitted model.
    #[arg(long, value_name = "FILE")]
    pub model_out: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Kmeans,
    Hdbscan,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::Hdbscan)]
    pub algo: AlgoArg,
    /// Number of clusters for KMeans.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub n_init: usize,
    #[arg(long, default_value_t = 30)]
    pub min_cluster_size: usize,
    /// Defaults to the minimum cluster size.
    #[arg(long)]
    pub min_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Arithmetic,
    Max,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub clusters: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    /// Categories with fewer annotated tracks are left out.
    #[arg(long, default_value_t = 30)]
    pub min_instances: usize,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "0:0.5:0.05")]
    pub fractions: String,
    #[arg(long, value_enum, default_value_t = NormArg::Arithmetic)]
    pub normalization: NormArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 36)]
    pub categories: usize,
    #[arg(long, default_value_t = 1.1)]
    pub zipf: f64,
    #[arg(long, default_value_t = 12_000)]
    pub tracks: usize,
    #[arg(long, default_value_t = 50)]
    pub dims: usize,
    /// Standard deviation of crops around their category centre.
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 100.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.0)]
    pub outlier_fraction: f64,
    #[arg(long, default_value_t = 0.0)]
    pub error_fraction: f64,
    #[arg(long, default_value_t = 12)]
    pub known_categories: usize,
    #[arg(long, default_value_t = 3)]
    pub min_crops: usize,
    #[arg(long, default_value_t = 30)]
    pub max_crops: usize,
    /// Probability of cutting a track between two consecutive frames.
    #[arg(long, default_value_t = 0.1)]
    pub fragmentation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    /// Track file supplying the detector's labels.
    #[arg(long)]
    pub tracks: Option<PathBuf>,
    #[arg(long)]
    pub clusters: Option<PathBuf>,
    /// Categories below this size count as the long tail.
    #[arg(long, default_value_t = 30)]
    pub cutoff: usize,
    #[arg(long, default_value_t = 80)]
    pub min_cluster_display: usize,
    /// Comma-separated categories the detector knows; defaults to the
    /// detector labels in the track file.
    #[arg(long)]
    pub known: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Exit with status 2 when anything is inconsistent.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .try_init();
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn clap_exit(e: clap::Error) -> i32 {
    let _ = e.print();
    match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
        _ => 1,
    }
}

fn parse(args: &[OsString]) -> Result<Cli, i32> {
    let cmd = Cli::command();
    let matches = cmd.clone().try_get_matches_from(args).map_err(clap_exit)?;
    let Some(config) = matches.get_one::<PathBuf>("config").cloned() else {
        return Cli::from_arg_matches(&matches).map_err(clap_exit);
    };
    let (sub, sub_matches) = matches.subcommand().expect("subcommand is required");
    let extra = match crate::config::config_args(&config, &cmd, sub, sub_matches) {
        Ok(extra) => extra,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(e.exit_code());
        }
    };
    // Rebuild as `prog sub <config flags> <original flags>`.
    let mut rebuilt = vec![args[0].clone(), OsString::from(sub)];
    rebuilt.extend(extra);
    let mut skipped_sub = false;
    let mut after_config = false;
    for a in &args[1..] {
        if !skipped_sub && !after_config && a == sub {
            skipped_sub = true;
            continue;
        }
        after_config = a == "--config";
        rebuilt.push(a.clone());
    }
    let matches = cmd.try_get_matches_from(rebuilt).map_err(clap_exit)?;
    Cli::from_arg_matches(&matches).map_err(clap_exit)
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Merge(a) => merge(a),
        Command::Summarize(a) => summarize(a),
        Command::Reduce(a) => reduce(a),
        Command::Cluster(a) => cluster(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Simulate(a) => simulate(a),
        Command::Report(a) => report(a),
        Command::Validate(a) => validate(a),
    }
}

fn usage(e: impl std::fmt::Display) -> Error {
    Error::Usage(e.to_string())
}

fn merge(a: MergeArgs) -> Result<()> {
    let cfg = MergeConfig::new(a.gamma, a.lambda_min).map_err(usage)?;
    let mode = if a.lenient { ReadMode::Lenient } else { ReadMode::Strict };
    let tracklets = read_tracklets(&a.tracklets, mode)?;
    let timeline = read_timeline(&a.timeline, mode)?;
    for e in tracklets.errors.iter().chain(&timeline.errors) {
        warn!("skipped line {}: {}", e.line, e.message);
    }
    let store = TrackletStore::new(tracklets.records.into_iter().map(|r| r.tracklet).collect())
        .map_err(|e| Error::data(&a.tracklets, None, e.to_string()))?;
    let timeline = timeline_from(timeline.records);
    let tracks = merge_tracklets(&store, &timeline, &cfg).map_err(|e| Error::data(&a.timeline, None, e.to_string()))?;
    let stats = compression_report(&CompressionInput {
        frames: timeline.frame_count() as u64,
        tracklets: store.len() as u64,
        tracks: tracks.len() as u64,
        ..Default::default()
    });
    info!(
        "merged {} tracklets into {} tracks ({:.2} tracklets per track)",
        store.len(),
        tracks.len(),
        stats.tracklets_per_track.unwrap_or(0.0)
    );
    let records: Vec<TrackRecord> = tracks.into_iter().map(TrackRecord::from).collect();
    write_tracks(&a.out, &records)
}

fn summarize(a: SummarizeArgs) -> Result<()> {
    let crops = read_embeddings(&a.crops)?;
    let mode = match a.mode {
        ModeArg::ClosestToMean => SummaryMode::ClosestToMean,
        ModeArg::Mean => SummaryMode::Mean,
    };
    let summary = summarize_matrix(&crops, mode).map_err(|e| Error::data(&a.crops, None, e.to_string()))?;
    info!("{} crops -> {} tracks", crops.rows(), summary.embeddings.rows());
    write_embeddings(&a.out, &summary.embeddings)
}

fn reduce(a: ReduceArgs) -> Result<()> {
    let data = read_embeddings(&a.input)?;
    let model = match &a.model {
        Some(p) => read_pca(p)?,
        None => pca_fit(&data, a.dims).map_err(usage)?,
    };
    let reduced = pca_transform(&model, &data).map_err(|e| Error::data(&a.input, None, e.to_string()))?;
    let kept: f64 = model.explained_variance.iter().sum();
    if model.total_variance > 0.0 {
        info!(
            "{} -> {} dims, {:.2}% of variance kept",
            data.dims(),
            reduced.dims(),
            100.0 * kept / model.total_variance
        );
    }
    if let Some(p) = &a.model_out {
        write_pca(p, &model)?;
    }
    write_embeddings(&a.out, &reduced)
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let data = read_embeddings(&a.input)?;
    let result: ClusteringResult = match a.algo {
        AlgoArg::Kmeans => {
            let k = a.k.ok_or_else(|| usage("--algo kmeans needs --k"))?;
            let cfg = KMeansConfig::new(k).with_seed(a.seed).with_n_init(a.n_init);
            kmeans_fit(&data, &cfg).map_err(|e| Error::data(&a.input, None, e.to_string()))?.result
        }
        AlgoArg::Hdbscan => {
            let mut cfg = HdbscanConfig::new(a.min_cluster_size);
            if let Some(ms) = a.min_samples {
                cfg = cfg.with_min_samples(ms);
            }
            cfg.seed = a.seed;
            if a.min_cluster_size < 2 || cfg.min_samples == 0 {
                return Err(usage("--min-cluster-size must be at least 2 and --min-samples at least 1"));
            }
            hdbscan_fit(&data, &cfg).map_err(|e| Error::data(&a.input, None, e.to_string()))?.result
        }
    };
    info!(
        "{} rows -> {} clusters, {} noise",
        result.len(),
        result.n_clusters,
        result.noise_count()
    );
    write_clusters(&a.out, &ClusterTable::from_result(data.row_ids().to_vec(), &result))
}

/// `start:stop:step` or `a,b,c`.
pub fn parse_fractions(s: &str) -> Result<Vec<f64>> {
    let bad = || usage(format!("bad --fractions {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        return fraction_grid(v[0], v[1], v[2]).map_err(usage);
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let fractions = parse_fractions(&a.fractions)?;
    let table = read_clusters(&a.clusters)?;
    let annotations: BTreeMap<String, Annotation> = read_annotations(&a.annotations)?.into_iter().collect();

    let rows: Vec<usize> = (0..table.row_ids.len())
        .filter(|&i| annotations.contains_key(&table.row_ids[i]))
        .collect();
    let clustered: BTreeSet<&str> = table.row_ids.iter().map(String::as_str).collect();
    let unclustered = annotations.keys().filter(|k| !clustered.contains(k.as_str())).count();
    if unclustered > 0 {
        warn!("{unclustered} annotated tracks are missing from the clustering");
    }
    let anns: Vec<&Annotation> = rows.iter().map(|&i| &annotations[&table.row_ids[i]]).collect();
    let outcome = filter_annotations(&anns, a.min_instances);
    let ex = &outcome.excluded;
    info!(
        "evaluating {} of {} annotated tracks; excluded {} unknown, {} tracking error, {} in {} categories below {} instances",
        outcome.retained.len(),
        rows.len(),
        ex.unknown,
        ex.tracking_error,
        ex.rare_category,
        outcome.rare_categories.len(),
        a.min_instances
    );
    if outcome.retained.is_empty() {
        return Err(Error::data(&a.annotations, None, "no annotated track survives the evaluation filter"));
    }

    let pick: Vec<usize> = outcome.retained.iter().map(|&r| rows[r]).collect();
    let set = LabeledEvalSet::new(
        pick.iter().map(|&i| table.row_ids[i].clone()).collect(),
        pick.iter()
            .map(|&i| annotations[&table.row_ids[i]].category().unwrap_or_default().to_string())
            .collect(),
        pick.iter().map(|&i| table.labels[i]).collect(),
        pick.iter().map(|&i| table.scores[i]).collect(),
        table.marks_noise(),
    )
    .map_err(|e| Error::data(&a.clusters, None, e.to_string()))?;
    let norm = match a.normalization {
        NormArg::Arithmetic => AmiNormalization::Arithmetic,
        NormArg::Max => AmiNormalization::Max,
    };
    let curve = outlier_curve_with(&set, &fractions, norm).map_err(usage)?;
    if let Some(first) = curve.points.first() {
        info!("AMI {:?} at fraction {}", first.ami, first.fraction);
    }
    if let Some(p) = curve.distinguished.map(|i| curve.points[i]) {
        info!("clusterer's own noise fraction {:.4}: AMI {:?}", p.fraction, p.ami);
    }
    write_curve(&a.out, &curve)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n_categories: a.categories,
        zipf_exponent: a.zipf,
        n_tracks: a.tracks,
        embedding_dims: a.dims,
        cluster_spread: a.spread,
        center_separation: a.separation,
        outlier_fraction: a.outlier_fraction,
        tracking_error_fraction: a.error_fraction,
        seed: a.seed,
        n_known_categories: a.known_categories,
        crops_per_track: (a.min_crops, a.max_crops),
    };
    let col = generate_collection(&spec).map_err(usage)?;
    let stream = generate_tracklet_stream(&spec, a.fragmentation).map_err(usage)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let out = |name: &str| a.out.join(name);

    let tracks: Vec<TrackRecord> = col.tracks.iter().map(|t| TrackRecord::from(t.track.clone())).collect();
    write_tracks(&out("tracks.jsonl"), &tracks)?;
    let ids: Vec<String> = col.tracks.iter().map(|t| t.track.id.to_string()).collect();
    write_annotations(
        &out("annotations.csv"),
        ids.iter().map(String::as_str).zip(col.tracks.iter().map(|t| &t.annotation)),
    )?;
    write_embeddings(&out("crops.emb"), &col.crops)?;
    let tracklets: Vec<TrackletRecord> = stream.tracklets.iter().cloned().map(TrackletRecord::from).collect();
    write_tracklets(&out("tracklets.jsonl"), &tracklets)?;
    write_timeline(&out("timeline.jsonl"), &stream.timeline)?;
    write_truth(
        &out("truth.json"),
        &TruthFile {
            spec,
            fragmentation_rate: a.fragmentation,
            truth: col.truth,
            tracklet_track: stream.truth_track.iter().map(|t| t.0).collect(),
        },
    )?;
    info!(
        "wrote {} tracks ({} crops) and {} tracklets to {}",
        tracks.len(),
        col.crops.rows(),
        tracklets.len(),
        a.out.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct FullReport {
    distribution: CategoryDistribution,
    #[serde(skip_serializing_if = "Option::is_none")]
    clusters: Option<ClusterSummary>,
}

fn placeholder_track(id: &str) -> Track {
    Track {
        id: TrackId(id.parse().unwrap_or(0)),
        tracklet_ids: Vec::new(),
        observations: Vec::new(),
        label: TrackLabel::Unknown,
        junctions: Vec::new(),
    }
}

fn report(a: ReportArgs) -> Result<()> {
    let annotations = read_annotations(&a.annotations)?;
    let tracks: Option<BTreeMap<String, Track>> = match &a.tracks {
        Some(p) => Some(
            read_tracks(p, ReadMode::Strict)?
                .records
                .into_iter()
                .map(|r| (r.track.id.to_string(), r.track))
                .collect(),
        ),
        None => None,
    };
    let annotated: Vec<AnnotatedTrack> = annotations
        .iter()
        .map(|(id, ann)| AnnotatedTrack {
            track: tracks
                .as_ref()
                .and_then(|t| t.get(id).cloned())
                .unwrap_or_else(|| placeholder_track(id)),
            annotation: ann.clone(),
        })
        .collect();
    let distribution = distribution_report(&annotated, a.cutoff);

    let known: Vec<String> = match (&a.known, &tracks) {
        (Some(list), _) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        (None, Some(t)) => {
            let set: BTreeSet<String> = t
                .values()
                .filter_map(|t| match &t.label {
                    TrackLabel::Known(l) => Some(l.clone()),
                    TrackLabel::Unknown => None,
                })
                .collect();
            set.into_iter().collect()
        }
        (None, None) => Vec::new(),
    };

    let clusters = match &a.clusters {
        Some(p) => {
            let table = read_clusters(p)?;
            let cats: BTreeMap<&str, &str> = annotations
                .iter()
                .filter_map(|(id, ann)| ann.category().map(|c| (id.as_str(), c)))
                .collect();
            let rows: Vec<usize> = (0..table.row_ids.len())
                .filter(|&i| cats.contains_key(table.row_ids[i].as_str()))
                .collect();
            let set = LabeledEvalSet::new(
                rows.iter().map(|&i| table.row_ids[i].clone()).collect(),
                rows.iter().map(|&i| cats[table.row_ids[i].as_str()].to_string()).collect(),
                rows.iter().map(|&i| table.labels[i]).collect(),
                rows.iter().map(|&i| table.scores[i]).collect(),
                table.marks_noise(),
            )
            .map_err(|e| Error::data(p, None, e.to_string()))?;
            let result = ClusteringResult {
                assignments: table.labels.clone(),
                outlier_scores: table.scores.clone(),
                n_clusters: table.n_clusters(),
                meta: match &table.meta {
                    Some(m) => m.algorithm.clone(),
                    None => trackmine_core::cluster::AlgorithmMeta::Hdbscan {
                        min_cluster_size: 0,
                        min_samples: 0,
                        noise_fraction: table.labels.iter().filter(|&&l| l == NOISE).count() as f64
                            / table.labels.len().max(1) as f64,
                    },
                },
            };
            Some(cluster_report(&result, &set, a.min_cluster_display, &known))
        }
        None => None,
    };

    let body = match a.format {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&FullReport { distribution, clusters })
                .map_err(|e| Error::Usage(e.to_string()))?;
            s.push('\n');
            s
        }
        FormatArg::Text => render_report(&distribution, clusters.as_ref(), tracks.is_some()),
    };
    emit(a.out.as_deref(), &body)
}

fn render_report(d: &CategoryDistribution, clusters: Option<&ClusterSummary>, detector: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<18}{:>10}", "Tracks", d.total_tracks);
    let _ = writeln!(s, "{:<18}{:>10}", "Categorized", d.categorized);
    let _ = writeln!(s, "{:<18}{:>10}", "Unknown objects", d.unknown_valid);
    let rate = d.error_rate.map(|r| format!(" ({:.1}%)", 100.0 * r)).unwrap_or_default();
    let _ = writeln!(s, "{:<18}{:>10}{rate}", "Tracking errors", d.tracking_errors);
    if detector {
        let _ = writeln!(s, "{:<18}{:>10}", "Detector known", d.detector_known);
        let _ = writeln!(s, "{:<18}{:>10}", "Detector unknown", d.detector_unknown);
    }
    let _ = writeln!(
        s,
        "\n{} categories, {} below {} tracks",
        d.counts.len(),
        d.below_cutoff,
        d.cutoff
    );
    let width = d.counts.iter().map(|(c, _)| c.len()).max().unwrap_or(8).max(8);
    for (c, n) in &d.counts {
        let mark = if *n < d.cutoff { "  *" } else { "" };
        let _ = writeln!(s, "  {c:<width$}{n:>8}{mark}");
    }
    if let Some(cs) = clusters {
        let _ = writeln!(
            s,
            "\nClusters of at least {} tracks ({} smaller, {} noise)",
            cs.min_cluster_display, cs.hidden, cs.noise
        );
        let _ = writeln!(s, "  {:>6} {:>7} {:>9}  {:<width$} {:>7}  novel", "label", "size", "annotated", "dominant", "purity");
        for c in &cs.clusters {
            let purity = c.purity.map(|p| format!("{p:.3}")).unwrap_or_else(|| "-".into());
            let dominant = c.dominant.as_deref().unwrap_or("-");
            let novel = if c.novel { "yes" } else { "" };
            let _ = writeln!(
                s,
                "  {:>6} {:>7} {:>9}  {dominant:<width$} {purity:>7}  {novel}",
                c.label, c.size, c.annotated
            );
        }
    }
    s
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::io(p, e)),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn validate(a: ValidateArgs) -> Result<()> {
    let report = ingest_validate(&a.dir)?;
    let body = match a.format {
        FormatArg::Text => report.render(),
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Usage(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    emit(a.out.as_deref(), &body)?;
    if a.strict && !report.is_clean() {
        return Err(Error::data(
            &a.dir,
            None,
            format!(
                "{} dangling references, {} unreadable records",
                report.dangling.len(),
                report.problems.len()
            ),
        ));
    }
    Ok(())
}
