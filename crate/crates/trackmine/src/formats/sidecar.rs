//! Small JSON artifacts: the synthetic ground truth and fitted PCA models.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use trackmine_core::embedding::PcaModel;
use trackmine_core::synthetic::{SyntheticSpec, SyntheticTruth};

use crate::error::{Error, Location, Result};

/// Everything the generator knows about a simulated data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    pub spec: SyntheticSpec,
    pub fragmentation_rate: f64,
    pub truth: SyntheticTruth,
    /// Source track of each tracklet in `tracklets.jsonl`, by tracklet id.
    pub tracklet_track: Vec<u64>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, e.into()))?;
    body.push('\n');
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&body).map_err(|e| Error::data(path, Some(Location::Line(e.line() as u64)), e.to_string()))
}

pub fn write_truth(path: &Path, truth: &TruthFile) -> Result<()> {
    write_json(path, truth)
}

pub fn read_truth(path: &Path) -> Result<TruthFile> {
    read_json(path)
}

pub fn write_pca(path: &Path, model: &PcaModel) -> Result<()> {
    write_json(path, model)
}

pub fn read_pca(path: &Path) -> Result<PcaModel> {
    read_json(path)
}
