//! Rank-k truncated SVD by randomized subspace iteration.

use super::decomp::{orthonormal_basis, symmetric_eigen};
use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;
use rand_distr::{Distribution, StandardNormal};

pub const OVERSAMPLING: usize = 10;
pub const POWER_ITERATIONS: usize = 4;
const MAX_EXTRA_ITERATIONS: usize = 20;

/// `A ~ left * right` with orthonormal `left` columns; singular values are
/// folded into the rows of `right`.
#[derive(Clone, Debug)]
pub struct SvdResult<T> {
    /// `n x k`, orthonormal columns.
    pub left: DenseMatrix<T>,
    /// `k x m`; row `i` has norm `sigma_i`.
    pub right: DenseMatrix<T>,
    /// Estimated singular values, descending.
    pub singular_values: Vec<T>,
    /// `||A - left * right||_F`.
    pub residual: T,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SvdOptions {
    pub oversampling: usize,
    pub power_iterations: usize,
    /// Relative change in captured energy below which extra power iterations stop.
    pub epsilon: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            oversampling: OVERSAMPLING,
            power_iterations: POWER_ITERATIONS,
            epsilon: 1e-6,
        }
    }
}

pub fn truncated_svd<T: Scalar>(a: &DenseMatrix<T>, k: usize, epsilon: f64, seed: u64) -> Result<SvdResult<T>> {
    truncated_svd_with(a, k, SvdOptions { epsilon, ..SvdOptions::default() }, seed)
}

pub fn truncated_svd_with<T: Scalar>(
    a: &DenseMatrix<T>,
    k: usize,
    opts: SvdOptions,
    seed: u64,
) -> Result<SvdResult<T>> {
    let (n, m) = a.shape();
    if k == 0 || k > n.min(m) {
        return Err(Error::invalid(format!("rank {k} outside 1..={}", n.min(m))));
    }
    if !a.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let l = (k + opts.oversampling).min(n.min(m));
    let mut rng = rng::seeded(seed);
    let omega = DenseMatrix::from_fn(m, l, |_, _| {
        let g: f64 = StandardNormal.sample(&mut rng);
        T::of(g)
    });
    let total_energy = a.values().iter().map(|&v| v * v).sum::<T>();

    let mut q = orthonormal_basis(&a.matmul(&omega));
    let mut iterations = 0;
    let mut captured = T::zero();
    let mut converged = false;
    loop {
        if iterations >= opts.power_iterations {
            let (_, right, _) = project(a, &q, k);
            let now = right.values().iter().map(|&v| v * v).sum::<T>();
            let change = (now - captured).abs() / total_energy.max(T::min_positive_value());
            captured = now;
            if change.as_f64() <= opts.epsilon {
                converged = true;
                break;
            }
            if iterations >= opts.power_iterations + MAX_EXTRA_ITERATIONS {
                break;
            }
        }
        let z = orthonormal_basis(&a.matmul_tn(&q));
        q = orthonormal_basis(&a.matmul(&z));
        iterations += 1;
    }

    let (left, right, singular_values) = project(a, &q, k);
    let residual = a.sub(&left.matmul(&right)).frobenius_norm();
    if !converged {
        return Err(Error::NonConvergence {
            residual: residual.as_f64(),
        });
    }
    Ok(SvdResult {
        left,
        right,
        singular_values,
        residual,
        iterations,
    })
}

/// Rayleigh-Ritz step: with `B = Q^T A`, `B B^T = W diag(s^2) W^T`, the
/// leading factors are `Q W_k` and `W_k^T B`.
fn project<T: Scalar>(a: &DenseMatrix<T>, q: &DenseMatrix<T>, k: usize) -> (DenseMatrix<T>, DenseMatrix<T>, Vec<T>) {
    let b = q.matmul_tn(a);
    let (vals, w) = symmetric_eigen(&b.matmul_nt(&b));
    let keep: Vec<usize> = (0..k).collect();
    let wk = w.select_columns(&keep);
    let left = q.matmul(&wk);
    let right = wk.matmul_tn(&b);
    let sv = vals[..k].iter().map(|&v| v.max(T::zero()).sqrt()).collect();
    (left, right, sv)
}
