//! Matrix helpers backed by nalgebra: Hermitian spectra and QR.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{Tensor, C64};

pub(crate) fn to_dmatrix(m: &Tensor) -> Result<DMatrix<C64>> {
    if m.rank() != 2 {
        return Err(Error::Shape(format!("expected a matrix, got dims {:?}", m.dims())));
    }
    Ok(DMatrix::from_row_slice(m.nrows(), m.ncols(), m.data()))
}

pub(crate) fn from_dmatrix(m: &DMatrix<C64>) -> Tensor {
    let (r, c) = m.shape();
    let mut data = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            data.push(m[(i, j)]);
        }
    }
    Tensor::matrix(r, c, data).expect("shape from nalgebra matrix")
}

/// Eigenvalues of a Hermitian matrix, sorted non-increasing.
pub fn hermitian_eigenvalues(m: &Tensor) -> Result<Vec<f64>> {
    if m.rank() != 2 || m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got dims {:?}",
            m.dims()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mat = to_dmatrix(m)?;
    // symmetrize against round-off before the Hermitian solver
    let herm = (&mat + mat.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Largest deviation of `m` from its own adjoint.
pub fn hermiticity_error(m: &Tensor) -> Result<f64> {
    Ok(m.max_abs_diff(&m.adjoint()?))
}

/// `max |A^H A - I|` over all components.
pub fn unitarity_error(m: &Tensor) -> Result<f64> {
    let gram = m.adjoint()?.matmul(m)?;
    Ok(gram.max_abs_diff(&Tensor::identity_matrix(m.ncols())))
}

/// Thin QR of a square matrix; returns `(Q, diag(R))`.
pub(crate) fn qr_square(m: &Tensor) -> Result<(Tensor, Vec<C64>)> {
    let qr = to_dmatrix(m)?.qr();
    let r = qr.r();
    let diag = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)]).collect();
    Ok((from_dmatrix(&qr.q()), diag))
}

/// Eigenvalues of a real square matrix, possibly complex.
pub(crate) fn real_eigenvalues_complex(m: &DMatrix<f64>) -> Vec<C64> {
    m.complex_eigenvalues().iter().copied().collect()
}
