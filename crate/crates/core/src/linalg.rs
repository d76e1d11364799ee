// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Eigen-decompositions. These run in `f64` regardless of the scalar type.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::{from_c64, to_c64, Real};

/// Eigenvalues (ascending) and orthonormal eigenvectors as columns.
pub struct HermitianEigen<F: Real> {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix<Complex<F>>,
}

fn to_na<F: Real>(m: &DenseMatrix<Complex<F>>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| to_c64(*m.get(i, j)))
}

/// Decomposes a Hermitian matrix. Only the Hermitian part is used.
pub fn hermitian_eigen<F: Real>(m: &DenseMatrix<Complex<F>>) -> Result<HermitianEigen<F>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "eigen-decomposition of a non-square matrix".into(),
        ));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let a = to_na(m);
    let h = (&a + a.adjoint()) * Complex::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| from_c64(eig.eigenvectors[(i, order[j])]));
    Ok(HermitianEigen { values, vectors })
}

/// Orthogonal projector onto the span of the eigenvectors whose eigenvalue
/// satisfies `keep`.
pub fn spectral_projector<F: Real>(eig: &HermitianEigen<F>, keep: impl Fn(f64) -> bool) -> DenseMatrix<Complex<F>> {
    let n = eig.vectors.rows();
    let cols: Vec<usize> = (0..n).filter(|&k| keep(eig.values[k])).collect();
    DenseMatrix::from_fn(n, n, |i, j| {
        cols.iter().fold(Complex::new(F::zero(), F::zero()), |acc, &k| {
            acc + eig.vectors.get(i, k) * eig.vectors.get(j, k).conj()
        })
    })
}

/// Real symmetric eigen-decomposition: ascending values, columns of `vectors`.
pub fn symmetric_eigen(w: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = w.len();
    if w.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    if (0..n).any(|i| (0..i).any(|j| (w[i][j] - w[j][i]).abs() > 1e-12 * (1.0 + w[i][j].abs()))) {
        return Err(Error::NotSymmetric);
    }
    let a = DMatrix::from_fn(n, n, |i, j| w[i][j]);
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = (0..n)
        .map(|i| order.iter().map(|&k| eig.eigenvectors[(i, k)]).collect())
        .collect();
    Ok((values, vectors))
}

/// Moore–Penrose pseudo-inverse of a Hermitian positive semidefinite matrix,
/// applied to `rhs`. Eigenvalues below `cutoff · λ_max` are treated as zero.
pub(crate) fn psd_solve(
    gram: &DMatrix<Complex<f64>>,
    rhs: &DVector<Complex<f64>>,
    cutoff: f64,
) -> DVector<Complex<f64>> {
    let eig = gram.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut out = DVector::zeros(rhs.len());
    for k in 0..eig.eigenvalues.len() {
        let l = eig.eigenvalues[k];
        if l.abs() <= cutoff * lmax.max(f64::MIN_POSITIVE) {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let proj = v.adjoint() * rhs;
        out += v * (proj[(0, 0)] / l);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_pauli_y() {
        let m = DenseMatrix::from_row_major(
            2,
            2,
            vec![
                Complex::new(0.0, 0.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eigen::<f64>(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let p = spectral_projector(&e, |l| l > 0.0);
        assert!((p.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_rejects_asymmetric() {
        assert_eq!(
            symmetric_eigen(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap_err(),
            Error::NotSymmetric
        );
        let (v, _) = symmetric_eigen(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(v, vec![1.0, 4.0]);
    }
}
