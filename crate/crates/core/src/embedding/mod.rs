//! Per-track summary vectors and PCA reduction.

mod eigen;
mod pca;

use alloc::vec::Vec;

use crate::model::{EmbeddingError, EmbeddingMatrix, TrackId};

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use pca::{pca_fit, pca_fit_with, pca_transform, PcaError, PcaModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SummaryError {
    #[error("track has no crop embeddings")]
    NoRows,
    #[error("crop row {row} has {len} values, expected {dims}")]
    RaggedRow { row: usize, len: usize, dims: usize },
}

/// How a track's crop embeddings are reduced to one vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SummaryMode {
    /// The crop embedding nearest to the mean of all crops, copied verbatim.
    #[default]
    ClosestToMean,
    /// The arithmetic mean itself.
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackEmbedding {
    pub track_id: TrackId,
    pub vector: Vec<f32>,
    /// Index of the chosen crop; `None` in [`SummaryMode::Mean`].
    pub source_crop_index: Option<usize>,
}

fn mean_of(rows: &[&[f32]]) -> Result<Vec<f64>, SummaryError> {
    let first = rows.first().ok_or(SummaryError::NoRows)?;
    let dims = first.len();
    let mut mean = alloc::vec![0.0f64; dims];
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dims {
            return Err(SummaryError::RaggedRow {
                row: r,
                len: row.len(),
                dims,
            });
        }
        for (m, &v) in mean.iter_mut().zip(row.iter()) {
            *m += v as f64;
        }
    }
    let n = rows.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

/// Picks the crop whose embedding is closest (Euclidean) to the mean of the
/// track's crop embeddings; the lowest row index wins a tie.
pub fn representative_embedding(
    track_id: TrackId,
    crops: &[&[f32]],
) -> Result<TrackEmbedding, SummaryError> {
    let mean = mean_of(crops)?;
    let mut best = (f64::INFINITY, 0usize);
    for (i, row) in crops.iter().enumerate() {
        let d: f64 = row
            .iter()
            .zip(&mean)
            .map(|(&v, &m)| {
                let t = v as f64 - m;
                t * t
            })
            .sum();
        if d < best.0 {
            best = (d, i);
        }
    }
    Ok(TrackEmbedding {
        track_id,
        vector: crops[best.1].to_vec(),
        source_crop_index: Some(best.1),
    })
}

pub fn mean_embedding(track_id: TrackId, crops: &[&[f32]]) -> Result<TrackEmbedding, SummaryError> {
    let mean = mean_of(crops)?;
    Ok(TrackEmbedding {
        track_id,
        vector: mean.into_iter().map(|v| v as f32).collect(),
        source_crop_index: None,
    })
}

pub fn summarize(
    track_id: TrackId,
    crops: &[&[f32]],
    mode: SummaryMode,
) -> Result<TrackEmbedding, SummaryError> {
    match mode {
        SummaryMode::ClosestToMean => representative_embedding(track_id, crops),
        SummaryMode::Mean => mean_embedding(track_id, crops),
    }
}

/// Track part of a crop row id `"<track>#<crop>"`; ids without `#` name
/// their own track.
pub fn crop_track_key(row_id: &str) -> &str {
    row_id.rsplit_once('#').map_or(row_id, |(track, _)| track)
}

/// One summary row per track, in order of each track's first crop.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSummary {
    /// Row ids are the track keys.
    pub embeddings: EmbeddingMatrix,
    /// Crop row chosen for each track; `None` in [`SummaryMode::Mean`].
    pub source_rows: Vec<Option<usize>>,
}

/// Groups crop rows by [`crop_track_key`] and summarises every group.
pub fn summarize_matrix(crops: &EmbeddingMatrix, mode: SummaryMode) -> Result<MatrixSummary, EmbeddingError> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: alloc::collections::BTreeMap<&str, Vec<usize>> = alloc::collections::BTreeMap::new();
    for (i, id) in crops.row_ids().iter().enumerate() {
        let key = crop_track_key(id);
        let rows = groups.entry(key).or_default();
        if rows.is_empty() {
            order.push(key);
        }
        rows.push(i);
    }
    let dims = crops.dims();
    let mut data = Vec::with_capacity(order.len() * dims);
    let mut source_rows = Vec::with_capacity(order.len());
    for key in &order {
        let members = &groups[key];
        let rows: Vec<&[f32]> = members.iter().map(|&i| crops.row(i)).collect();
        let e = summarize(TrackId(0), &rows, mode).expect("groups are non-empty and rows share dims");
        data.extend_from_slice(&e.vector);
        source_rows.push(e.source_crop_index.map(|c| members[c]));
    }
    let ids = order.iter().map(|k| alloc::string::String::from(*k)).collect();
    Ok(MatrixSummary {
        embeddings: EmbeddingMatrix::new(order.len(), dims, data, ids)?,
        source_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_crop_is_its_own_representative() {
        let row = [1.5f32, -2.0, 3.25];
        let e = representative_embedding(TrackId(3), &[&row]).unwrap();
        assert_eq!(e.vector, row.to_vec());
        assert_eq!(e.source_crop_index, Some(0));
    }

    #[test]
    fn mean_that_is_a_row() {
        let rows: [&[f32]; 3] = [&[-1.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]];
        let e = representative_embedding(TrackId(0), &rows).unwrap();
        assert_eq!(e.source_crop_index, Some(1));
        assert_eq!(e.vector, [0.0, 0.0]);
    }

    #[test]
    fn tie_goes_to_lowest_index() {
        let rows: [&[f32]; 2] = [&[1.0], &[-1.0]];
        assert_eq!(
            representative_embedding(TrackId(0), &rows)
                .unwrap()
                .source_crop_index,
            Some(0)
        );
    }

    #[test]
    fn empty_track_is_an_error() {
        assert_eq!(
            representative_embedding(TrackId(0), &[]),
            Err(SummaryError::NoRows)
        );
    }

    #[test]
    fn matrix_rows_group_by_track_key() {
        let ids = ["4#0", "4#1", "x", "4#2", "a#b#1"].map(alloc::string::String::from).to_vec();
        let data = alloc::vec![0.0, 1.0, 7.0, 2.0, 5.0];
        let m = EmbeddingMatrix::new(5, 1, data, ids).unwrap();
        let s = summarize_matrix(&m, SummaryMode::ClosestToMean).unwrap();
        assert_eq!(s.embeddings.row_ids(), ["4", "x", "a#b"]);
        assert_eq!(s.embeddings.data(), [1.0, 7.0, 5.0]);
        assert_eq!(s.source_rows, [Some(1), Some(2), Some(4)]);
    }

    #[test]
    fn mean_mode_averages() {
        let rows: [&[f32]; 2] = [&[1.0, 4.0], &[3.0, 0.0]];
        let e = summarize(TrackId(0), &rows, SummaryMode::Mean).unwrap();
        assert_eq!(e.vector, [2.0, 2.0]);
        assert_eq!(e.source_crop_index, None);
    }
}
