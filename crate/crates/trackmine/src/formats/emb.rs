//! `EMB1` embedding matrices: magic, `u64` rows, `u64` dims (little endian),
//! `rows * dims` little-endian `f32` values, then one UTF-8 row id per line.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use trackmine_core::EmbeddingMatrix;

use crate::error::{Error, Location, Result};

pub const MAGIC: &[u8; 4] = b"EMB1";
const HEADER_LEN: usize = 20;

pub fn write_embeddings(path: &Path, m: &EmbeddingMatrix) -> Result<()> {
    if let Some(i) = m.row_ids().iter().position(|id| id.contains('\n')) {
        return Err(Error::data(path, None, format!("row id {i} contains a newline")));
    }
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(fs::File::create(path).map_err(io)?);
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&(m.rows() as u64).to_le_bytes()).map_err(io)?;
    out.write_all(&(m.dims() as u64).to_le_bytes()).map_err(io)?;
    for v in m.data() {
        out.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    for id in m.row_ids() {
        out.write_all(id.as_bytes()).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(path, &bytes)
}

/// `path` is only used in error messages.
pub fn parse_embeddings(path: &Path, bytes: &[u8]) -> Result<EmbeddingMatrix> {
    let fail = |at: usize, msg: String| Error::data(path, Some(Location::Byte(at as u64)), msg);
    if bytes.len() < HEADER_LEN {
        return Err(fail(bytes.len(), format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(fail(0, "missing EMB1 magic".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (rows, dims) = (word(4), word(12));
    let values_len = rows
        .checked_mul(dims)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| usize::try_from(n).ok())
        .filter(|&n| n <= bytes.len() - HEADER_LEN)
        .ok_or_else(|| fail(4, format!("header claims {rows} x {dims} values, file has {} bytes", bytes.len())))?;
    let (rows, dims) = (rows as usize, dims as usize);
    let ids_at = HEADER_LEN + values_len;
    let data: Vec<f32> = bytes[HEADER_LEN..ids_at]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(fail(HEADER_LEN + 4 * i, "non-finite value".into()));
    }

    let tail = &bytes[ids_at..];
    let text = std::str::from_utf8(tail).map_err(|e| fail(ids_at + e.valid_up_to(), "row ids are not UTF-8".into()))?;
    let text = text.strip_suffix('\n').unwrap_or(text);
    let ids: Vec<String> = if rows == 0 && text.is_empty() {
        Vec::new()
    } else {
        text.split('\n').map(String::from).collect()
    };
    if ids.len() != rows {
        return Err(fail(ids_at, format!("{} row ids for {rows} rows", ids.len())));
    }
    EmbeddingMatrix::new(rows, dims, data, ids).map_err(|e| fail(ids_at, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmbeddingMatrix {
        EmbeddingMatrix::new(2, 3, vec![1.0, -2.5, 3.0, 0.0, 1e-30, 7.25], vec!["a#0".into(), "b".into()]).unwrap()
    }

    #[test]
    fn round_trip_and_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.emb");
        write_embeddings(&p, &sample()).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(bytes.len(), 20 + 24 + "a#0\nb\n".len());
        assert_eq!(&bytes[4..12], &2u64.to_le_bytes());
        assert_eq!(read_embeddings(&p).unwrap(), sample());
    }

    #[test]
    fn damage_is_located() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.emb");
        write_embeddings(&p, &sample()).unwrap();
        let good = fs::read(&p).unwrap();

        let err = parse_embeddings(&p, &good[..30]).unwrap_err();
        assert!(matches!(err, Error::Data { at: Some(Location::Byte(4)), .. }), "{err}");

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(parse_embeddings(&p, &bad), Err(Error::Data { at: Some(Location::Byte(0)), .. })));

        let extra = [good.as_slice(), b"c\n"].concat();
        assert!(matches!(parse_embeddings(&p, &extra), Err(Error::Data { at: Some(Location::Byte(44)), .. })));

        let mut nan = good;
        nan[24..28].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(parse_embeddings(&p, &nan), Err(Error::Data { at: Some(Location::Byte(24)), .. })));
    }
}
