//! Dense numerical kernels shared by the model and the baselines.

pub mod decomp;
mod matrix;
pub mod maxvol;
mod random;
mod ridge;
mod softmax;
pub mod svd;

pub use matrix::DenseMatrix;
pub use maxvol::{maxvol, MaxvolResult};
pub use random::{gumbel_from_uniform, gumbel_noise, UNIFORM_CLAMP};
pub use ridge::{ridge_solve, DEFAULT_RIDGE};
pub use softmax::softmax_rows;
pub(crate) use softmax::softmax_in_place;
pub use svd::{truncated_svd, SvdResult};
