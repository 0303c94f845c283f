use super::DenseMatrix;
use crate::scalar::Scalar;
use rand::Rng;

/// Clamp applied to uniforms before the double log.
pub const UNIFORM_CLAMP: f64 = 1e-12;

/// Standard Gumbel sample from a uniform `u`: `-ln(-ln u)`.
pub fn gumbel_from_uniform(u: f64) -> f64 {
    let u = u.clamp(UNIFORM_CLAMP, 1.0 - UNIFORM_CLAMP);
    -(-u.ln()).ln()
}

/// Matrix of i.i.d. Gumbel(0, 1) draws.
pub fn gumbel_noise<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| T::of(gumbel_from_uniform(rng.random::<f64>())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn inverse_e_maps_to_zero() {
        assert!(gumbel_from_uniform((-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn extremes_stay_finite() {
        assert!(gumbel_from_uniform(0.0).is_finite());
        assert!(gumbel_from_uniform(1.0).is_finite());
    }

    #[test]
    fn sample_mean_is_euler_gamma() {
        let mut rng = seeded(2024);
        let g: DenseMatrix<f64> = gumbel_noise(1000, 1000, &mut rng);
        let mean = g.values().iter().sum::<f64>() / 1e6;
        assert!((mean - 0.577_215_664_9).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn same_seed_same_noise() {
        let a: DenseMatrix<f32> = gumbel_noise(3, 5, &mut seeded(1));
        let b: DenseMatrix<f32> = gumbel_noise(3, 5, &mut seeded(1));
        assert_eq!(a, b);
    }
}
