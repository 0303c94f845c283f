//! Forward and reverse passes of the relaxed-selection encoder and the
//! two-layer decoder.
//!
//! Shapes: `r` is `b x m`, `phi`/`y` are `k x m`, `z` is `b x k`,
//! `h` is `b x d`, `r_hat` is `b x m`.

use super::params::{DecoderParams, EncoderLogits};
use crate::linalg::{gumbel_noise, softmax_in_place, DenseMatrix};
use crate::scalar::{sigmoid, Scalar};
use rand::Rng;

#[derive(Clone, Debug)]
pub struct Encoded<T> {
    /// Relaxed one-hot rows.
    pub y: DenseMatrix<T>,
    /// Soft feedback on the sampled seeds.
    pub z: DenseMatrix<T>,
    /// Gumbel noise the sample was drawn with.
    pub noise: DenseMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct Activations<T> {
    pub h: DenseMatrix<T>,
    pub r_hat: DenseMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct Gradients<T> {
    pub phi: DenseMatrix<T>,
    pub decoder: DecoderParams<T>,
}

/// Draws one Gumbel matrix for the whole batch and encodes it.
pub fn encode<T: Scalar, R: Rng + ?Sized>(
    encoder: &EncoderLogits<T>,
    r: &DenseMatrix<T>,
    tau: T,
    rng: &mut R,
) -> Encoded<T> {
    let noise = gumbel_noise(encoder.k(), encoder.m(), rng);
    encode_with_noise(encoder, r, tau, noise)
}

/// `y = softmax_rows(phi + noise, tau)`, `z = r y^T`.
pub fn encode_with_noise<T: Scalar>(
    encoder: &EncoderLogits<T>,
    r: &DenseMatrix<T>,
    tau: T,
    noise: DenseMatrix<T>,
) -> Encoded<T> {
    assert!(tau > T::zero(), "temperature must be positive");
    let mut y = encoder.phi.clone();
    y.add_assign(&noise);
    for i in 0..y.rows() {
        softmax_in_place(y.row_mut(i), tau);
    }
    let z = r.matmul_nt(&y);
    Encoded { y, z, noise }
}

pub fn decode_full<T: Scalar>(theta: &DecoderParams<T>, z: &DenseMatrix<T>) -> Activations<T> {
    let mut h = z.matmul(&theta.w1);
    add_bias_then_sigmoid(&mut h, &theta.b1);
    let mut r_hat = h.matmul(&theta.w2);
    add_bias_then_sigmoid(&mut r_hat, &theta.b2);
    Activations { h, r_hat }
}

/// `sigmoid(W2^T sigmoid(W1^T z + b1) + b2)` for every row of `z`.
pub fn decode<T: Scalar>(theta: &DecoderParams<T>, z: &DenseMatrix<T>) -> DenseMatrix<T> {
    decode_full(theta, z).r_hat
}

fn add_bias_then_sigmoid<T: Scalar>(x: &mut DenseMatrix<T>, bias: &[T]) {
    for i in 0..x.rows() {
        for (v, &b) in x.row_mut(i).iter_mut().zip(bias) {
            *v = sigmoid(*v + b);
        }
    }
}

/// Squared error summed over items, averaged over the batch.
pub fn loss<T: Scalar>(r_hat: &DenseMatrix<T>, r: &DenseMatrix<T>) -> T {
    assert_eq!(r_hat.shape(), r.shape());
    let b = T::of(r.rows().max(1) as f64);
    r_hat
        .values()
        .iter()
        .zip(r.values())
        .map(|(&p, &t)| (t - p) * (t - p))
        .sum::<T>()
        / b
}

/// Reverse pass through the decoder. Returns parameter gradients and the
/// gradient with respect to `z`.
pub fn decoder_backward<T: Scalar>(
    theta: &DecoderParams<T>,
    z: &DenseMatrix<T>,
    acts: &Activations<T>,
    r: &DenseMatrix<T>,
) -> (DecoderParams<T>, DenseMatrix<T>) {
    let scale = T::of(2.0 / r.rows().max(1) as f64);
    let mut d_a2 = acts.r_hat.clone();
    for (g, &t) in d_a2.values_mut().iter_mut().zip(r.values()) {
        let p = *g;
        *g = scale * (p - t) * p * (T::one() - p);
    }
    let w2 = acts.h.matmul_tn(&d_a2);
    let b2 = d_a2.column_sums();
    let mut d_a1 = d_a2.matmul_nt(&theta.w2);
    for (g, &h) in d_a1.values_mut().iter_mut().zip(acts.h.values()) {
        *g *= h * (T::one() - h);
    }
    let w1 = z.matmul_tn(&d_a1);
    let b1 = d_a1.column_sums();
    let dz = d_a1.matmul_nt(&theta.w1);
    (DecoderParams { w1, b1, w2, b2 }, dz)
}

/// Loss and exact gradients of the full encoder + decoder for a batch,
/// replaying the given noise.
pub fn backward<T: Scalar>(
    encoder: &EncoderLogits<T>,
    theta: &DecoderParams<T>,
    r: &DenseMatrix<T>,
    tau: T,
    noise: DenseMatrix<T>,
) -> (T, Gradients<T>) {
    let enc = encode_with_noise(encoder, r, tau, noise);
    let acts = decode_full(theta, &enc.z);
    let value = loss(&acts.r_hat, r);
    let (decoder, dz) = decoder_backward(theta, &enc.z, &acts, r);
    // dL/dy = dz^T r, then back through the tempered softmax of each row.
    let mut phi = dz.matmul_tn(r);
    for i in 0..phi.rows() {
        let y = enc.y.row(i);
        let g = phi.row_mut(i);
        let dot: T = g.iter().zip(y).map(|(&a, &b)| a * b).sum();
        for (gj, &yj) in g.iter_mut().zip(y) {
            *gj = yj * (*gj - dot) / tau;
        }
    }
    (value, Gradients { phi, decoder })
}
