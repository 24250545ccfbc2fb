//! Times both clusterers on a synthetic collection with one crop per track.
//!
//! `cargo run --release -p trackmine-core --example scale -- 100000 boruvka`

use std::time::Instant;

use trackmine_core::cluster::{hdbscan_fit, kmeans_fit, HdbscanConfig, KMeansConfig, MstStrategy};
use trackmine_core::synthetic::{generate_collection, SyntheticSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let strategy = match args.get(2).map(String::as_str) {
        Some("prim") => MstStrategy::Prim,
        Some("boruvka") => MstStrategy::Boruvka,
        _ => MstStrategy::Auto,
    };
    let spec = SyntheticSpec {
        n_tracks: n,
        crops_per_track: (1, 1),
        seed: 1,
        ..SyntheticSpec::default()
    };
    let t = Instant::now();
    let data = generate_collection(&spec).expect("valid spec").crops;
    println!("generate: {:.2?}", t.elapsed());

    let t = Instant::now();
    let fit = hdbscan_fit(&data, &HdbscanConfig::new(30).with_strategy(strategy)).expect("fit");
    println!(
        "hdbscan ({:?}): {:.2?}, {} clusters, {} noise",
        fit.strategy,
        t.elapsed(),
        fit.result.n_clusters,
        fit.result.noise_count()
    );

    let t = Instant::now();
    let km = kmeans_fit(&data, &KMeansConfig::new(36).with_seed(1)).expect("fit");
    println!("kmeans: {:.2?}, inertia {:.4e}", t.elapsed(), km.inertia);
}
