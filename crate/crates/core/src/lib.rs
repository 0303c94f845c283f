//! Cold-start rating elicitation.
//!
//! A new user is asked about `k` seed items; their answers are decoded
//! into scores for every other item. The seed set and the decoder are
//! learned jointly by relaxing the discrete choice of seeds with
//! Gumbel-Softmax sampling. Statistic-based and maximal-volume baselines
//! and the top-N evaluation protocol live alongside.
//!
//! Numerical code is generic over [`Scalar`]; the aliases below fix the
//! precisions used in practice: `f32` for training, `f64` for linear
//! algebra and gradient checking.

pub mod baselines;
pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type Matrix32 = linalg::DenseMatrix<f32>;
pub type Encoder = model::EncoderLogits<f32>;
pub type Decoder = model::DecoderParams<f32>;
pub type Decoder64 = model::DecoderParams<f64>;
pub type Model = model::DreModel<f32>;
pub type Fitted = model::FittedDre<f32>;
