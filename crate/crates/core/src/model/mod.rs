//! The rating-elicitation network: a Gumbel-Softmax encoder choosing `k`
//! seed items, a two-layer sigmoid decoder reconstructing full rating
//! vectors from feedback on them, and their training.

mod adam;
mod checkpoint;
mod config;
mod network;
mod params;
mod train;

pub use adam::{adam_step, AdamState};
pub use checkpoint::{Checkpoint, MAGIC as CHECKPOINT_MAGIC};
pub use config::{temperature, TrainConfig};
pub use network::{backward, decode, decode_full, decoder_backward, encode, encode_with_noise, loss, Activations, Encoded, Gradients};
pub use params::{DecoderParams, EncoderLogits, SeedItemset};
pub use train::{
    extract_seeds, fit_decoder, fit_dre, hard_feedback, hard_selection_loss, recommend, retrain_decoder, train,
    validation_ndcg, DecoderFit, DreModel, EpochRecord, FittedDre, TrainOutcome, LOGIT_INIT_SCALE,
};
