use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use rand::Rng;

/// Unnormalized log-probabilities of the `k` categorical distributions over
/// `m` items. Row-wise softmax at temperature 1 recovers the probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderLogits<T> {
    pub phi: DenseMatrix<T>,
}

impl<T: Scalar> EncoderLogits<T> {
    pub fn new(phi: DenseMatrix<T>) -> Self {
        Self { phi }
    }

    /// Small uniform logits in `[-scale, scale]`.
    pub fn init<R: Rng + ?Sized>(k: usize, m: usize, scale: f64, rng: &mut R) -> Self {
        Self {
            phi: DenseMatrix::from_fn(k, m, |_, _| T::of(rng.random_range(-scale..=scale))),
        }
    }

    pub fn k(&self) -> usize {
        self.phi.rows()
    }

    pub fn m(&self) -> usize {
        self.phi.cols()
    }

    /// Row-stochastic probabilities.
    pub fn probabilities(&self) -> DenseMatrix<T> {
        crate::linalg::softmax_rows(&self.phi, T::one()).expect("unit temperature")
    }

    pub fn cast<U: Scalar>(&self) -> EncoderLogits<U> {
        EncoderLogits { phi: self.phi.cast() }
    }
}

/// Two sigmoid layers `k -> d -> m`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderParams<T> {
    /// `k x d`
    pub w1: DenseMatrix<T>,
    pub b1: Vec<T>,
    /// `d x m`
    pub w2: DenseMatrix<T>,
    pub b2: Vec<T>,
}

impl<T: Scalar> DecoderParams<T> {
    pub fn zeros(k: usize, d: usize, m: usize) -> Self {
        Self {
            w1: DenseMatrix::zeros(k, d),
            b1: vec![T::zero(); d],
            w2: DenseMatrix::zeros(d, m),
            b2: vec![T::zero(); m],
        }
    }

    /// Each layer's weights and bias drawn from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn init<R: Rng + ?Sized>(k: usize, d: usize, m: usize, rng: &mut R) -> Self {
        let mut layer = |fan_in: usize, rows: usize, cols: usize| {
            let a = 1.0 / (fan_in as f64).sqrt();
            let w = DenseMatrix::from_fn(rows, cols, |_, _| T::of(rng.random_range(-a..=a)));
            let b = (0..cols).map(|_| T::of(rng.random_range(-a..=a))).collect::<Vec<_>>();
            (w, b)
        };
        let (w1, b1) = layer(k, k, d);
        let (w2, b2) = layer(d, d, m);
        Self { w1, b1, w2, b2 }
    }

    pub fn k(&self) -> usize {
        self.w1.rows()
    }

    pub fn d(&self) -> usize {
        self.w1.cols()
    }

    pub fn m(&self) -> usize {
        self.w2.cols()
    }

    pub fn check_shapes(&self) -> Result<()> {
        let (k, d, m) = (self.k(), self.d(), self.m());
        if self.b1.len() != d || self.w2.rows() != d || self.b2.len() != m {
            return Err(Error::Format(format!(
                "inconsistent decoder shapes for k={k}, d={d}, m={m}"
            )));
        }
        Ok(())
    }

    pub fn tensors(&self) -> [&[T]; 4] {
        [self.w1.values(), &self.b1, self.w2.values(), &self.b2]
    }

    pub fn tensors_mut(&mut self) -> [&mut [T]; 4] {
        [self.w1.values_mut(), &mut self.b1, self.w2.values_mut(), &mut self.b2]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn cast<U: Scalar>(&self) -> DecoderParams<U> {
        DecoderParams {
            w1: self.w1.cast(),
            b1: self.b1.iter().map(|v| U::of(v.as_f64())).collect(),
            w2: self.w2.cast(),
            b2: self.b2.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}

/// Ordered, distinct item indices shown to every new user.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeedItemset {
    items: Vec<usize>,
}

impl SeedItemset {
    pub fn new(items: Vec<usize>, m: usize) -> Result<Self> {
        let mut sorted = items.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != items.len() {
            return Err(Error::invalid("seed items must be distinct"));
        }
        if let Some(&bad) = items.iter().find(|&&j| j >= m) {
            return Err(Error::invalid(format!("seed item {bad} out of range for {m} items")));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.items.contains(&item)
    }

    /// Membership mask of length `m`.
    pub fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &j in &self.items {
            mask[j] = true;
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn seed_itemset_validation() {
        assert!(SeedItemset::new(vec![3, 1], 4).is_ok());
        assert!(SeedItemset::new(vec![3, 3], 4).is_err());
        assert!(SeedItemset::new(vec![4], 4).is_err());
    }

    #[test]
    fn init_shapes_and_bounds() {
        let p: DecoderParams<f64> = DecoderParams::init(4, 9, 16, &mut seeded(0));
        p.check_shapes().unwrap();
        assert!(p.w1.max_abs() <= 0.5);
        assert!(p.w2.max_abs() <= 1.0 / 3.0);
        let e: EncoderLogits<f32> = EncoderLogits::init(2, 5, 0.01, &mut seeded(0));
        assert_eq!((e.k(), e.m()), (2, 5));
        let probs = e.probabilities();
        for i in 0..2 {
            assert!((probs.row(i).iter().sum::<f32>() - 1.0).abs() < 1e-6);
        }
    }
}
