use super::adam::{adam_step, AdamState};
use super::config::{temperature, TrainConfig};
use super::network::{backward, decode, decode_full, decoder_backward, loss};
use super::params::{DecoderParams, EncoderLogits, SeedItemset};
use crate::data::{RatingMatrix, SplitSpec};
use crate::error::{Error, Result};
use crate::eval::{evaluate_method, rank_candidates, Metric};
use crate::linalg::{gumbel_noise, DenseMatrix};
use crate::rng::{self, Rng};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Half-width of the uniform initialization of the encoder logits.
pub const LOGIT_INIT_SCALE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct DreModel<T> {
    pub encoder: EncoderLogits<T>,
    pub decoder: DecoderParams<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub tau: f64,
    pub train_loss: f64,
    /// Validation NDCG at `val_cutoff` with hard seeds, when measured.
    pub val_ndcg: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub last: DreModel<T>,
    /// Parameters at the best validation score; `last` when never validated.
    pub best: DreModel<T>,
    pub best_epoch: Option<usize>,
    pub history: Vec<EpochRecord>,
}

/// Result of the full pipeline: joint training, seed extraction and
/// decoder re-training.
#[derive(Clone, Debug)]
pub struct FittedDre<T> {
    pub encoder: EncoderLogits<T>,
    pub decoder: DecoderParams<T>,
    pub seeds: SeedItemset,
    pub history: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
}

/// One seed per categorical row, the row's most probable item.
///
/// Rows are served in descending order of their peak probability; a row
/// whose favourite is already taken falls back to its best free item.
pub fn extract_seeds<T: Scalar>(encoder: &EncoderLogits<T>) -> SeedItemset {
    let (k, m) = encoder.phi.shape();
    assert!(k <= m, "cannot pick {k} distinct seeds from {m} items");
    let probs = encoder.cast::<f64>().probabilities();
    let mut ranked_rows: Vec<(usize, f64)> = (0..k)
        .map(|i| (i, probs.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max)))
        .collect();
    ranked_rows.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut taken = vec![false; m];
    let mut seeds = vec![usize::MAX; k];
    for (row, _) in ranked_rows {
        let pick = rank_candidates(probs.row(row), &taken, 1)[0];
        taken[pick] = true;
        seeds[row] = pick;
    }
    SeedItemset::new(seeds, m).expect("distinct by construction")
}

fn joint_tensors<T: Scalar>(model: &mut DreModel<T>) -> [&mut [T]; 5] {
    let [w1, b1, w2, b2] = model.decoder.tensors_mut();
    [model.encoder.phi.values_mut(), w1, b1, w2, b2]
}

fn sizes<T: Scalar>(tensors: &[&[T]]) -> Vec<usize> {
    tensors.iter().map(|t| t.len()).collect()
}

/// Joint training of encoder logits and decoder on the training users.
pub fn train<T: Scalar>(matrix: &RatingMatrix, split: &SplitSpec, cfg: &TrainConfig) -> Result<TrainOutcome<T>> {
    cfg.validate(matrix.m())?;
    if split.train_users.is_empty() {
        return Err(Error::invalid("no training users"));
    }
    let m = matrix.m();
    let mut rng = rng::seeded(cfg.seed);
    let mut model = DreModel {
        encoder: EncoderLogits::init(cfg.k, m, LOGIT_INIT_SCALE, &mut rng),
        decoder: DecoderParams::init(cfg.k, cfg.d, m, &mut rng),
    };
    let mut state = {
        let [w1, b1, w2, b2] = model.decoder.tensors();
        AdamState::new(&sizes(&[model.encoder.phi.values(), w1, b1, w2, b2]))
    };
    let mut order = split.train_users.clone();
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    let mut best: Option<(f64, usize, DreModel<T>)> = None;

    for epoch in 0..=cfg.epochs {
        let tau = temperature(epoch, cfg);
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let r = matrix.dense_rows::<T>(batch);
            let noise = gumbel_noise(cfg.k, m, &mut rng);
            let (value, grads) = backward(&model.encoder, &model.decoder, &r, T::of(tau), noise);
            let value = value.as_f64();
            if !value.is_finite() {
                return Err(Error::Divergence { epoch, loss: value });
            }
            total += value * batch.len() as f64;
            let [gw1, gb1, gw2, gb2] = grads.decoder.tensors();
            adam_step(
                &mut joint_tensors(&mut model),
                &[grads.phi.values(), gw1, gb1, gw2, gb2],
                &mut state,
                cfg.lr,
            );
        }
        let due = cfg.val_every > 0 && ((epoch + 1) % cfg.val_every == 0 || epoch == cfg.epochs);
        let val_ndcg = if due {
            validation_ndcg(matrix, &split.val_users, &model, cfg.val_cutoff)?
        } else {
            None
        };
        if let Some(score) = val_ndcg {
            if best.as_ref().is_none_or(|(b, _, _)| score > *b) {
                best = Some((score, epoch, model.clone()));
            }
        }
        history.push(EpochRecord {
            epoch,
            tau,
            train_loss: total / order.len() as f64,
            val_ndcg,
        });
    }
    let (best_epoch, best_model) = match best {
        Some((_, e, b)) => (Some(e), b),
        None => (None, model.clone()),
    };
    Ok(TrainOutcome {
        last: model,
        best: best_model,
        best_epoch,
        history,
    })
}

/// Mean NDCG of the hard-seed decoder over `users`; `None` if nobody is evaluable.
pub fn validation_ndcg<T: Scalar>(
    matrix: &RatingMatrix,
    users: &[usize],
    model: &DreModel<T>,
    cutoff: usize,
) -> Result<Option<f64>> {
    if users.is_empty() {
        return Ok(None);
    }
    let seeds = extract_seeds(&model.encoder);
    let cutoff = cutoff.min(matrix.m() - seeds.len());
    match evaluate_method(&model.decoder, matrix, users, &seeds, &[cutoff]) {
        Ok(t) => Ok(t.mean(Metric::Ndcg, cutoff)),
        Err(Error::DegenerateEvaluation { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Optimizer settings of decoder-only training.
#[derive(Clone, Copy, Debug)]
pub struct DecoderFit {
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl From<&TrainConfig> for DecoderFit {
    fn from(cfg: &TrainConfig) -> Self {
        Self {
            lr: cfg.lr,
            batch_size: cfg.batch_size,
            seed: rng::derive_seed(cfg.seed, "decoder", 0),
        }
    }
}

/// Hard selection `r[:, S]` for a batch of users.
pub fn hard_feedback<T: Scalar>(matrix: &RatingMatrix, users: &[usize], seeds: &SeedItemset) -> DenseMatrix<T> {
    DenseMatrix::from_fn(users.len(), seeds.len(), |i, s| {
        if matrix.contains(users[i], seeds.items()[s]) {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Mean per-user loss of the decoder under hard selection.
pub fn hard_selection_loss<T: Scalar>(
    matrix: &RatingMatrix,
    users: &[usize],
    seeds: &SeedItemset,
    theta: &DecoderParams<T>,
) -> f64 {
    let mut total = 0.0;
    for batch in users.chunks(512) {
        let r = matrix.dense_rows::<T>(batch);
        let z = hard_feedback(matrix, batch, seeds);
        total += loss(&decode(theta, &z), &r).as_f64() * batch.len() as f64;
    }
    total / users.len().max(1) as f64
}

/// Decoder-only Adam training with the seeds frozen and hard feedback.
/// Returns the trained decoder and the per-epoch mean loss.
pub fn fit_decoder<T: Scalar>(
    matrix: &RatingMatrix,
    users: &[usize],
    seeds: &SeedItemset,
    mut theta: DecoderParams<T>,
    epochs: usize,
    fit: &DecoderFit,
) -> Result<(DecoderParams<T>, Vec<f64>)> {
    if theta.k() != seeds.len() || theta.m() != matrix.m() {
        return Err(Error::invalid("decoder shape does not match seeds / matrix"));
    }
    if epochs > 0 && users.is_empty() {
        return Err(Error::invalid("no training users"));
    }
    let mut rng: Rng = rng::seeded(fit.seed);
    let mut state = AdamState::new(&sizes(&theta.tensors()));
    let mut order = users.to_vec();
    let mut losses = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(fit.batch_size.max(1)) {
            let r = matrix.dense_rows::<T>(batch);
            let z = hard_feedback(matrix, batch, seeds);
            let acts = decode_full(&theta, &z);
            let value = loss(&acts.r_hat, &r).as_f64();
            if !value.is_finite() {
                return Err(Error::Divergence { epoch, loss: value });
            }
            total += value * batch.len() as f64;
            let (grads, _) = decoder_backward(&theta, &z, &acts, &r);
            adam_step(&mut theta.tensors_mut(), &grads.tensors(), &mut state, fit.lr);
        }
        losses.push(total / order.len() as f64);
    }
    Ok((theta, losses))
}

pub fn retrain_decoder<T: Scalar>(
    matrix: &RatingMatrix,
    split: &SplitSpec,
    seeds: &SeedItemset,
    theta: DecoderParams<T>,
    epochs: usize,
    fit: &DecoderFit,
) -> Result<DecoderParams<T>> {
    Ok(fit_decoder(matrix, &split.train_users, seeds, theta, epochs, fit)?.0)
}

/// `train`, then seeds from the best snapshot, then decoder re-training.
pub fn fit_dre<T: Scalar>(matrix: &RatingMatrix, split: &SplitSpec, cfg: &TrainConfig) -> Result<FittedDre<T>> {
    let outcome = train::<T>(matrix, split, cfg)?;
    let DreModel { encoder, decoder } = outcome.best;
    let seeds = extract_seeds(&encoder);
    let decoder = retrain_decoder(matrix, split, &seeds, decoder, cfg.retrain_epochs, &DecoderFit::from(cfg))?;
    Ok(FittedDre {
        encoder,
        decoder,
        seeds,
        history: outcome.history,
        best_epoch: outcome.best_epoch,
    })
}

/// Top `n` candidate items for a new user who answered `feedback` on the seeds.
pub fn recommend<T: Scalar>(theta: &DecoderParams<T>, seeds: &SeedItemset, feedback: &[T], n: usize) -> Result<Vec<usize>> {
    let m = theta.m();
    if feedback.len() != seeds.len() {
        return Err(Error::invalid(format!(
            "expected {} feedback values, got {}",
            seeds.len(),
            feedback.len()
        )));
    }
    if n == 0 || n > m - seeds.len() {
        return Err(Error::invalid(format!("N = {n} outside 1..={}", m - seeds.len())));
    }
    let z = DenseMatrix::from_vec(1, feedback.len(), feedback.to_vec())?;
    let scores: Vec<f64> = decode(theta, &z).values().iter().map(|v| v.as_f64()).collect();
    Ok(rank_candidates(&scores, &seeds.mask(m), n))
}
