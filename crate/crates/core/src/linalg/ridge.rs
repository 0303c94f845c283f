use super::decomp::{cholesky, cholesky_solve};
use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_RIDGE: f64 = 1e-6;

/// `X = (A^T A + lambda I)^{-1} A^T B`, the minimizer of
/// `||B - A X||_F^2 + lambda ||X||_F^2`.
pub fn ridge_solve<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, lambda: f64) -> Result<DenseMatrix<T>> {
    if a.rows() != b.rows() {
        return Err(Error::invalid(format!(
            "design has {} rows but targets have {}",
            a.rows(),
            b.rows()
        )));
    }
    if lambda < 0.0 {
        return Err(Error::invalid("ridge penalty must be non-negative"));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("non-finite input to ridge_solve"));
    }
    let mut gram = a.matmul_tn(a);
    for i in 0..gram.rows() {
        gram[(i, i)] += T::of(lambda);
    }
    let factor = cholesky(&gram)?;
    Ok(cholesky_solve(&factor, &a.matmul_tn(b)))
}
