use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hyper-parameters of joint encoder/decoder training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Seed itemset size.
    pub k: usize,
    /// Hidden width of the decoder.
    pub d: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Initial temperature.
    pub t0: f64,
    /// Final temperature.
    pub te: f64,
    /// Decoder-only epochs with the seeds frozen.
    pub retrain_epochs: usize,
    pub seed: u64,
    /// Epochs between validation passes; 0 disables validation.
    pub val_every: usize,
    /// Cutoff of the validation NDCG used for model selection.
    pub val_cutoff: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            k: 50,
            d: 300,
            lr: 0.005,
            epochs: 400,
            batch_size: 256,
            t0: 10.0,
            te: 0.1,
            retrain_epochs: 100,
            seed: 0,
            val_every: 20,
            val_cutoff: 20,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, m: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.k == 0 || self.k >= m {
            return fail(format!("k = {} must satisfy 1 <= k < m = {m}", self.k));
        }
        if self.d == 0 {
            return fail("hidden width d must be at least 1".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if !(self.te > 0.0 && self.t0 >= self.te && self.t0.is_finite()) {
            return fail(format!("temperatures must satisfy t0 >= te > 0 (t0 = {}, te = {})", self.t0, self.te));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail(format!("learning rate {} must be positive", self.lr));
        }
        Ok(())
    }
}

/// Exponential annealing `t0 * (te / t0)^(e / E)`.
pub fn temperature(epoch: usize, cfg: &TrainConfig) -> f64 {
    let frac = epoch as f64 / cfg.epochs as f64;
    cfg.t0 * (cfg.te / cfg.t0).powf(frac)
}
