//! Small dense factorizations used by the SVD, Maxvol and ridge kernels.

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Thin Householder QR: returns the `n x l` orthonormal factor of an
/// `n x l` matrix with `n >= l`. Zero or dependent columns still yield
/// orthonormal output columns.
pub fn orthonormal_basis<T: Scalar>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (n, l) = a.shape();
    assert!(n >= l, "orthonormal_basis needs a tall matrix");
    let mut r = a.clone();
    let mut reflectors: Vec<Option<Vec<T>>> = Vec::with_capacity(l);
    for j in 0..l {
        let mut v: Vec<T> = (j..n).map(|i| r[(i, j)]).collect();
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm == T::zero() {
            reflectors.push(None);
            continue;
        }
        let alpha = if v[0] >= T::zero() { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if vnorm == T::zero() {
            reflectors.push(None);
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        reflect(&mut r, j, &v, j..l);
        reflectors.push(Some(v));
    }
    let mut q = DenseMatrix::zeros(n, l);
    for i in 0..l {
        q[(i, i)] = T::one();
    }
    for (j, v) in reflectors.iter().enumerate().rev() {
        if let Some(v) = v {
            reflect(&mut q, j, v, 0..l);
        }
    }
    q
}

/// Applies `I - 2 v v^T` to rows `offset..` of the given columns.
fn reflect<T: Scalar>(m: &mut DenseMatrix<T>, offset: usize, v: &[T], cols: std::ops::Range<usize>) {
    let two = T::of(2.0);
    for c in cols {
        let dot: T = v.iter().enumerate().map(|(i, &vi)| vi * m[(offset + i, c)]).sum();
        if dot == T::zero() {
            continue;
        }
        for (i, &vi) in v.iter().enumerate() {
            m[(offset + i, c)] -= two * vi * dot;
        }
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order and the matching eigenvectors
/// as the columns of the second matrix.
pub fn symmetric_eigen<T: Scalar>(s: &DenseMatrix<T>) -> (Vec<T>, DenseMatrix<T>) {
    let n = s.rows();
    assert_eq!(n, s.cols(), "symmetric_eigen needs a square matrix");
    let mut a = s.clone();
    let mut v = DenseMatrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: T = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    (values, v.select_columns(&order))
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky<T: Scalar>(g: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = g.rows();
    let scale = (0..n).map(|j| g[(j, j)].abs()).fold(T::zero(), T::max);
    let floor = scale * T::epsilon() * T::of(n as f64);
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)];
        for p in 0..j {
            d -= l[(j, p)] * l[(j, p)];
        }
        if !(d > floor) || !d.is_finite() {
            return Err(Error::Singular(format!("non-positive pivot {d} at column {j}")));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = g[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L L^T X = B` for every column of `B`.
pub fn cholesky_solve<T: Scalar>(l: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = l.rows();
    let mut x = b.clone();
    let cols = b.cols();
    for i in 0..n {
        for p in 0..i {
            let lip = l[(i, p)];
            if lip == T::zero() {
                continue;
            }
            for c in 0..cols {
                let v = x[(p, c)];
                x[(i, c)] -= lip * v;
            }
        }
        let d = l[(i, i)];
        for v in x.row_mut(i) {
            *v /= d;
        }
    }
    for i in (0..n).rev() {
        for p in (i + 1)..n {
            let lpi = l[(p, i)];
            if lpi == T::zero() {
                continue;
            }
            for c in 0..cols {
                let v = x[(p, c)];
                x[(i, c)] -= lpi * v;
            }
        }
        let d = l[(i, i)];
        for v in x.row_mut(i) {
            *v /= d;
        }
    }
    x
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial pivoting.
pub fn inverse<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "inverse needs a square matrix");
    let mut m = a.clone();
    let mut inv = DenseMatrix::identity(n);
    let scale = a.max_abs().max(T::min_positive_value());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())
            .unwrap();
        let p = m[(pivot, col)];
        if p.abs() <= scale * T::epsilon() * T::of(n as f64) {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        if pivot != col {
            for c in 0..n {
                m.values_mut().swap(pivot * n + c, col * n + c);
                inv.values_mut().swap(pivot * n + c, col * n + c);
            }
        }
        for c in 0..n {
            m[(col, c)] /= p;
            inv[(col, c)] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[(r, col)];
            if f == T::zero() {
                continue;
            }
            for c in 0..n {
                let mv = m[(col, c)];
                let iv = inv[(col, c)];
                m[(r, c)] -= f * mv;
                inv[(r, c)] -= f * iv;
            }
        }
    }
    Ok(inv)
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())
            .unwrap();
        let p = m[(pivot, col)];
        if p == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for c in 0..n {
                m.values_mut().swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        det *= p;
        for r in (col + 1)..n {
            let f = m[(r, col)] / p;
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= f * v;
            }
        }
    }
    det
}
