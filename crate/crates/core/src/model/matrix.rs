use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("data holds {actual} values, expected {rows} x {dims}")]
    ShapeMismatch {
        rows: usize,
        dims: usize,
        actual: usize,
    },
    #[error("{ids} row ids for {rows} rows")]
    IdCountMismatch { rows: usize, ids: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major `rows x dims` matrix of 32-bit features with one id per row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f32>,
    row_ids: Vec<String>,
}

impl EmbeddingMatrix {
    pub fn new(
        rows: usize,
        dims: usize,
        data: Vec<f32>,
        row_ids: Vec<String>,
    ) -> Result<Self, EmbeddingError> {
        if rows.checked_mul(dims) != Some(data.len()) {
            return Err(EmbeddingError::ShapeMismatch {
                rows,
                dims,
                actual: data.len(),
            });
        }
        if row_ids.len() != rows {
            return Err(EmbeddingError::IdCountMismatch {
                rows,
                ids: row_ids.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(EmbeddingError::NonFinite {
                row: pos / dims,
                col: pos % dims,
            });
        }
        Ok(Self {
            rows,
            dims,
            data,
            row_ids,
        })
    }

    /// Builds a matrix from rows, naming them `0..rows`.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self, EmbeddingError> {
        let dims = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dims);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dims {
                return Err(EmbeddingError::ShapeMismatch {
                    rows: rows.len(),
                    dims,
                    actual: data.len() + r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        let ids = (0..rows.len()).map(|i| alloc::format!("{i}")).collect();
        Self::new(rows.len(), dims, data, ids)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f32]> + '_ {
        // chunks_exact(0) panics, and a zero-dim matrix still has rows.
        (0..self.rows).map(move |i| self.row(i))
    }

    /// New matrix holding the given rows in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.dims);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.row(i));
            ids.push(self.row_ids[i].clone());
        }
        Self {
            rows: indices.len(),
            dims: self.dims,
            data,
            row_ids: ids,
        }
    }

    pub fn into_parts(self) -> (usize, usize, Vec<f32>, Vec<String>) {
        (self.rows, self.dims, self.data, self.row_ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(
            EmbeddingMatrix::new(2, 2, vec![0.0; 3], vec!["a".into(), "b".into()]),
            Err(EmbeddingError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            EmbeddingMatrix::new(1, 2, vec![0.0, f32::NAN], vec!["a".into()]),
            Err(EmbeddingError::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            EmbeddingMatrix::new(1, 1, vec![0.0], vec![]),
            Err(EmbeddingError::IdCountMismatch { .. })
        ));
    }

    #[test]
    fn select_keeps_ids_aligned() {
        let m = EmbeddingMatrix::from_rows(&[[1.0f32, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let s = m.select(&[2, 0]);
        assert_eq!(s.row(0), &[5.0, 6.0]);
        assert_eq!(s.row_ids(), &["2".to_string(), "0".to_string()]);
    }
}
