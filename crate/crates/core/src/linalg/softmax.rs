use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-wise `exp(M_ij / tau) / sum_l exp(M_il / tau)`, evaluated after
/// subtracting each row's maximum.
pub fn softmax_rows<T: Scalar>(m: &DenseMatrix<T>, tau: T) -> Result<DenseMatrix<T>> {
    if !(tau > T::zero()) {
        return Err(Error::invalid(format!("temperature must be positive, got {tau}")));
    }
    let mut out = m.clone();
    for i in 0..out.rows() {
        softmax_in_place(out.row_mut(i), tau);
    }
    Ok(out)
}

pub(crate) fn softmax_in_place<T: Scalar>(row: &mut [T], tau: T) {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for v in row.iter_mut() {
        *v = ((*v - max) / tau).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(values: &[f64], tau: f64) -> Vec<f64> {
        let m = DenseMatrix::from_vec(1, values.len(), values.to_vec()).unwrap();
        softmax_rows(&m, tau).unwrap().into_values()
    }

    #[test]
    fn symmetric_row_is_uniform() {
        assert_eq!(row(&[0.0, 0.0], 1.0), vec![0.5, 0.5]);
    }

    #[test]
    fn cold_limit_is_one_hot() {
        let r = row(&[5.0, 0.0], 0.01);
        assert!((r[0] - 1.0).abs() < 1e-9 && r[1] < 1e-9);
    }

    #[test]
    fn hand_evaluated_three_way() {
        // e^1, e^2, e^3 over their sum 30.1928...
        let r = row(&[1.0, 2.0, 3.0], 1.0);
        for (got, want) in r.iter().zip([0.0900, 0.2447, 0.6652]) {
            assert!((got - want).abs() < 5e-5, "{got} vs {want}");
        }
    }

    #[test]
    fn nonpositive_temperature_rejected() {
        let m = DenseMatrix::<f64>::zeros(1, 2);
        assert!(softmax_rows(&m, 0.0).is_err());
        assert!(softmax_rows(&m, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn rows_sum_to_one_and_shift_invariant(
            values in proptest::collection::vec(-50.0f64..50.0, 1..12),
            shift in -100.0f64..100.0,
            tau in 0.01f64..20.0,
        ) {
            let a = row(&values, tau);
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let b = row(&shifted, tau);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }
}
