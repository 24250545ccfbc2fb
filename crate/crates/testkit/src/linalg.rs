//! Dense eigen-decomposition through nalgebra, for checking PCA.

use nalgebra::{DMatrix, SymmetricEigen};

/// Sample covariance (divided by `rows - 1`) of row-major data.
pub fn covariance(data: &[f64], rows: usize, dims: usize) -> DMatrix<f64> {
    let x = DMatrix::from_row_slice(rows, dims, data);
    let mean = x.row_mean();
    let mut centered = x.clone();
    for mut r in centered.row_iter_mut() {
        r -= &mean;
    }
    centered.transpose() * centered / (rows as f64 - 1.0)
}

/// Eigenpairs sorted by descending eigenvalue; vectors are the returned
/// matrix's columns, signed so their largest-magnitude entry is positive.
pub fn eigen_desc(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        let big = col.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if big < 0.0 {
            col = -col;
        }
        vecs.set_column(dst, &col);
    }
    (order.iter().map(|&i| eig.eigenvalues[i]).collect(), vecs)
}

/// Projects centred data on the top `k` eigenvectors of its covariance.
pub fn pca_project(data: &[f64], rows: usize, dims: usize, k: usize) -> DMatrix<f64> {
    let (_, vecs) = eigen_desc(covariance(data, rows, dims));
    let x = DMatrix::from_row_slice(rows, dims, data);
    let mean = x.row_mean();
    let mut centered = x.clone();
    for mut r in centered.row_iter_mut() {
        r -= &mean;
    }
    centered * vecs.columns(0, k)
}
