use crate::scalar::Scalar;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Moment buffers of Adam, one per parameter tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
    step: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(sizes: &[usize]) -> Self {
        Self {
            first: sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
            second: sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update of every tensor in `params`.
pub fn adam_step<T: Scalar>(params: &mut [&mut [T]], grads: &[&[T]], state: &mut AdamState<T>, lr: f64) {
    assert_eq!(params.len(), grads.len(), "parameter / gradient count mismatch");
    assert_eq!(params.len(), state.first.len(), "optimizer state built for other tensors");
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    let (b1, b2) = (T::of(BETA1), T::of(BETA2));
    let (one_b1, one_b2) = (T::of(1.0 - BETA1), T::of(1.0 - BETA2));
    let step_size = T::of(lr / c1);
    let c2_sqrt = T::of(c2.sqrt());
    let eps = T::of(EPSILON);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.first.iter_mut())
        .zip(state.second.iter_mut())
    {
        assert_eq!(p.len(), g.len(), "gradient shape mismatch");
        assert_eq!(p.len(), m.len(), "moment shape mismatch");
        for i in 0..p.len() {
            let gi = g[i];
            m[i] = b1 * m[i] + one_b1 * gi;
            v[i] = b2 * v[i] + one_b2 * gi * gi;
            // lr * m_hat / (sqrt(v_hat) + eps)
            p[i] -= step_size * m[i] / (v[i].sqrt() / c2_sqrt + eps);
        }
    }
}
