//! Dominant `k x k` submatrix search over the rows of a tall `m x k` matrix.
//!
//! The start is the pivot set of Gaussian elimination with partial
//! pivoting. Each swap replaces the selected row `S_j` by the row `i`
//! holding the largest coefficient `|C_ij|` of `C = B B_S^{-1}`. That
//! multiplies `|det B_S|` by `|C_ij| > 1`, so volume never decreases.

use super::decomp::inverse;
use super::DenseMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_MAX_ITER: usize = 200;
const REFRESH_EVERY: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct MaxvolResult {
    /// Selected row of `B` for each of the `k` slots.
    pub indices: Vec<usize>,
    pub swaps: usize,
    /// `false` when `max_iter` swaps ran out before dominance was reached.
    pub converged: bool,
    /// `max |B B_S^{-1}|` for the returned selection.
    pub max_coefficient: f64,
}

pub fn maxvol(b: &DenseMatrix<f64>, delta: f64, max_iter: usize) -> Result<MaxvolResult> {
    let (m, k) = b.shape();
    if k == 0 || m < k {
        return Err(Error::invalid(format!("maxvol needs m >= k >= 1, got {m}x{k}")));
    }
    if !b.is_finite() {
        return Err(Error::invalid("maxvol input has non-finite entries"));
    }
    if delta < 0.0 {
        return Err(Error::invalid("delta must be non-negative"));
    }
    let mut indices = pivoted_rows(b)?;
    let mut coeffs = coefficients(b, &indices)?;
    let mut swaps = 0;
    loop {
        let (i, j, value) = largest_entry(&coeffs);
        if value.abs() <= 1.0 + delta {
            return Ok(MaxvolResult {
                indices,
                swaps,
                converged: true,
                max_coefficient: value.abs(),
            });
        }
        if swaps >= max_iter {
            return Ok(MaxvolResult {
                indices,
                swaps,
                converged: false,
                max_coefficient: value.abs(),
            });
        }
        indices[j] = i;
        swaps += 1;
        if swaps % REFRESH_EVERY == 0 {
            coeffs = coefficients(b, &indices)?;
        } else {
            rank_one_update(&mut coeffs, i, j);
        }
    }
}

/// Row pivots chosen by elimination with partial pivoting.
fn pivoted_rows(b: &DenseMatrix<f64>) -> Result<Vec<usize>> {
    let (m, k) = b.shape();
    let mut work = b.clone();
    let mut used = vec![false; m];
    let mut pivots = Vec::with_capacity(k);
    let tol = b.max_abs() * f64::EPSILON * (m.max(k) as f64);
    for col in 0..k {
        let (row, val) = (0..m)
            .filter(|&r| !used[r])
            .map(|r| (r, work[(r, col)]))
            .fold((usize::MAX, 0.0f64), |best, (r, v)| if v.abs() > best.1.abs() { (r, v) } else { best });
        if row == usize::MAX || val.abs() <= tol {
            return Err(Error::RankDeficient(format!("no pivot for column {col} of a {m}x{k} matrix")));
        }
        used[row] = true;
        pivots.push(row);
        for r in 0..m {
            if used[r] {
                continue;
            }
            let f = work[(r, col)] / val;
            if f == 0.0 {
                continue;
            }
            for c in col..k {
                let p = work[(row, c)];
                work[(r, c)] -= f * p;
            }
        }
    }
    Ok(pivots)
}

fn coefficients(b: &DenseMatrix<f64>, indices: &[usize]) -> Result<DenseMatrix<f64>> {
    let square = b.select_rows(indices);
    let inv = inverse(&square).map_err(|e| Error::RankDeficient(e.to_string()))?;
    Ok(b.matmul(&inv))
}

fn largest_entry(c: &DenseMatrix<f64>) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0f64);
    for i in 0..c.rows() {
        for (j, &v) in c.row(i).iter().enumerate() {
            if v.abs() > best.2.abs() {
                best = (i, j, v);
            }
        }
    }
    best
}

/// After row `i` enters slot `j`: `C <- C - C[:, j] (C[i, :] - e_j) / C[i, j]`.
fn rank_one_update(c: &mut DenseMatrix<f64>, i: usize, j: usize) {
    let pivot = c[(i, j)];
    let mut direction = c.row(i).to_vec();
    direction[j] -= 1.0;
    for v in direction.iter_mut() {
        *v /= pivot;
    }
    for r in 0..c.rows() {
        let f = c[(r, j)];
        if f == 0.0 {
            continue;
        }
        for (x, &d) in c.row_mut(r).iter_mut().zip(&direction) {
            *x -= f * d;
        }
    }
}

/// `max |B B_S^{-1}|` recomputed from scratch.
pub fn dominance(b: &DenseMatrix<f64>, indices: &[usize]) -> Result<f64> {
    Ok(coefficients(b, indices)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::decomp::determinant;

    #[test]
    fn picks_the_two_large_rows() {
        let b = DenseMatrix::from_rows(&[vec![10.0, 0.0], vec![0.0, 10.0], vec![1.0, 1.0], vec![0.5, 0.5]])
            .unwrap();
        let mut got = maxvol(&b, DEFAULT_DELTA, DEFAULT_MAX_ITER).unwrap().indices;
        got.sort();
        assert_eq!(got, vec![0, 1]);
    }

    #[test]
    fn square_input_selects_everything() {
        let b = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let r = maxvol(&b, DEFAULT_DELTA, DEFAULT_MAX_ITER).unwrap();
        let mut idx = r.indices.clone();
        idx.sort();
        assert_eq!(idx, vec![0, 1]);
        assert_eq!(r.swaps, 0);
        assert!(r.converged);
    }

    #[test]
    fn rank_deficient_input_rejected() {
        let b = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(maxvol(&b, 0.01, 10), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn swaps_never_lose_volume_and_end_dominant() {
        let b = DenseMatrix::from_fn(40, 4, |i, j| (((i * 31 + j * 17) % 23) as f64 - 11.0) / 7.0);
        let start = pivoted_rows(&b).unwrap();
        let r = maxvol(&b, 0.01, 200).unwrap();
        assert!(r.converged);
        let v0 = determinant(&b.select_rows(&start)).abs();
        let v1 = determinant(&b.select_rows(&r.indices)).abs();
        assert!(v1 >= v0);
        assert!(dominance(&b, &r.indices).unwrap() <= 1.01 + 1e-9);
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let b = DenseMatrix::from_fn(40, 4, |i, j| (((i * 31 + j * 17) % 23) as f64 - 11.0) / 7.0);
        let full = maxvol(&b, 0.0, 200).unwrap();
        if full.swaps > 0 {
            let r = maxvol(&b, 0.0, 0).unwrap();
            assert!(!r.converged);
            assert_eq!(r.swaps, 0);
        }
    }
}
