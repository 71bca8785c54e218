//! Hermitian eigendecomposition wrapper.
//!
//! Density matrices here are often numerically rank-deficient (pure states
//! on a large truncated space), which trips the QR iteration in some dense
//! solvers. faer's self-adjoint solver handles these spectra reliably, so
//! every Hermitian eigenproblem in the crate goes through this module.

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::{c, CMat};

/// Eigendecomposition of the Hermitian part of `m`.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues in nondecreasing
/// order and eigenvectors as the matching columns.
pub(crate) fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        c64::new(z.re, z.im)
    });
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerics(format!("hermitian eigensolver failed: {e:?}")))?;
    let values: Vec<f64> = (0..n).map(|i| eig.S()[i].re).collect();
    let u = eig.U();
    let vectors = CMat::from_fn(n, n, |i, j| {
        let z = u[(i, j)];
        c(z.re, z.im)
    });
    Ok((values, vectors))
}

/// Eigenvalues of the Hermitian part of `m`, nondecreasing.
pub(crate) fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        c64::new(z.re, z.im)
    });
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerics(format!("hermitian eigensolver failed: {e:?}")))
}
