//! `clusters.csv` (`row_id,label,outlier_score`) with a JSON sidecar holding
//! the algorithm and its parameters.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trackmine_core::cluster::{AlgorithmMeta, ClusteringResult, NOISE};

use crate::error::{Error, Location, Result};

const HEADER: [&str; 3] = ["row_id", "label", "outlier_score"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMeta {
    pub rows: usize,
    pub n_clusters: usize,
    pub algorithm: AlgorithmMeta,
}

/// A clustering as stored on disk. The sidecar is optional for files that
/// come from elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTable {
    pub row_ids: Vec<String>,
    pub labels: Vec<i32>,
    pub scores: Vec<f64>,
    pub meta: Option<ClusterMeta>,
}

impl ClusterTable {
    pub fn from_result(row_ids: Vec<String>, result: &ClusteringResult) -> Self {
        Self {
            row_ids,
            labels: result.assignments.clone(),
            scores: result.outlier_scores.clone(),
            meta: Some(ClusterMeta {
                rows: result.len(),
                n_clusters: result.n_clusters,
                algorithm: result.meta.clone(),
            }),
        }
    }

    /// Whether noise labels come from the clusterer; without a sidecar any
    /// noise label counts as such.
    pub fn marks_noise(&self) -> bool {
        match &self.meta {
            Some(m) => matches!(m.algorithm, AlgorithmMeta::Hdbscan { .. }),
            None => self.labels.contains(&NOISE),
        }
    }

    pub fn n_clusters(&self) -> usize {
        let mut labels: Vec<i32> = self.labels.iter().copied().filter(|&l| l != NOISE).collect();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }
}

/// `clusters.csv` -> `clusters.meta.json`.
pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let at = e.position().map(|p| Location::Line(p.line()));
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::data(path, at, format!("{kind:?}")),
    }
}

pub fn write_clusters(path: &Path, table: &ClusterTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(HEADER).map_err(|e| csv_error(path, e))?;
    for ((id, l), s) in table.row_ids.iter().zip(&table.labels).zip(&table.scores) {
        w.write_record([id.as_str(), &l.to_string(), &s.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    if let Some(meta) = &table.meta {
        let mp = meta_path(path);
        let mut body = serde_json::to_string_pretty(meta).map_err(|e| Error::io(&mp, e.into()))?;
        body.push('\n');
        std::fs::write(&mp, body).map_err(|e| Error::io(&mp, e))?;
    }
    Ok(())
}

pub fn read_clusters(path: &Path) -> Result<ClusterTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::data(path, Some(Location::Line(1)), "expected header row_id,label,outlier_score"));
    }
    let mut table = ClusterTable {
        row_ids: Vec::new(),
        labels: Vec::new(),
        scores: Vec::new(),
        meta: None,
    };
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let at = Some(Location::Line(rec.position().map_or(0, |p| p.line())));
        let label: i32 = rec[1]
            .parse()
            .ok()
            .filter(|&l| l >= NOISE)
            .ok_or_else(|| Error::data(path, at, format!("bad label {:?}", &rec[1])))?;
        let score: f64 = rec[2]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite() && *s >= 0.0)
            .ok_or_else(|| Error::data(path, at, format!("bad outlier score {:?}", &rec[2])))?;
        table.row_ids.push(rec[0].to_string());
        table.labels.push(label);
        table.scores.push(score);
    }
    let mp = meta_path(path);
    if mp.exists() {
        let body = std::fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
        let meta: ClusterMeta = serde_json::from_str(&body)
            .map_err(|e| Error::data(&mp, Some(Location::Line(e.line() as u64)), e.to_string()))?;
        if meta.rows != table.labels.len() {
            return Err(Error::data(&mp, None, format!("meta says {} rows, table has {}", meta.rows, table.labels.len())));
        }
        table.meta = Some(meta);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_meta() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("clusters.csv");
        let result = ClusteringResult {
            assignments: vec![0, NOISE, 1],
            outlier_scores: vec![0.1, 0.9, 1.0 / 3.0],
            n_clusters: 2,
            meta: AlgorithmMeta::Hdbscan {
                min_cluster_size: 2,
                min_samples: 2,
                noise_fraction: 1.0 / 3.0,
            },
        };
        let table = ClusterTable::from_result(vec!["a".into(), "b".into(), "c".into()], &result);
        write_clusters(&p, &table).unwrap();
        assert!(meta_path(&p).ends_with("clusters.meta.json"));
        let back = read_clusters(&p).unwrap();
        assert_eq!(back, table);
        assert!(back.marks_noise());
        assert_eq!(back.n_clusters(), 2);
    }

    #[test]
    fn bad_label_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        std::fs::write(&p, "row_id,label,outlier_score\na,0,0.5\nb,-2,0.5\n").unwrap();
        assert!(matches!(read_clusters(&p), Err(Error::Data { at: Some(Location::Line(3)), .. })));
    }
}
