//! Comparison methods: random, popularity and RBMF seed selection, the
//! RBMF linear decoder, non-personalized MOSTPOP, and `++` variants that
//! pair any seed set with the neural decoder.

use crate::data::{RatingMatrix, SplitSpec};
use crate::error::{Error, Result};
use crate::eval::{rank_candidates, Predictor};
use crate::linalg::{maxvol, ridge_solve, truncated_svd, DenseMatrix, DEFAULT_RIDGE};
use crate::model::{fit_decoder, fit_dre, DecoderFit, DecoderParams, SeedItemset, TrainConfig};
use crate::rng;
use crate::scalar::Scalar;
use rand::Rng;
use std::fs;
use std::path::Path;

pub use crate::linalg::maxvol::{DEFAULT_DELTA, DEFAULT_MAX_ITER};

/// Convergence tolerance handed to the truncated SVD.
pub const SVD_EPSILON: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum SeedSelector {
    Random { seed: u64 },
    Popularity,
    Rbmf { delta: f64, seed: u64 },
    Dre(TrainConfig),
}

impl SeedSelector {
    /// Picks `k` seeds from the history of the split's training users.
    pub fn select(&self, matrix: &RatingMatrix, split: &SplitSpec, k: usize) -> Result<SeedItemset> {
        match self {
            SeedSelector::Random { seed } => select_random(matrix.m(), k, &mut rng::seeded(*seed)),
            SeedSelector::Popularity => select_popular(matrix, &split.train_users, k),
            SeedSelector::Rbmf { delta, seed } => rbmf_select(matrix, &split.train_users, k, *delta, *seed),
            SeedSelector::Dre(cfg) => {
                let cfg = TrainConfig { k, ..cfg.clone() };
                Ok(fit_dre::<f32>(matrix, split, &cfg)?.seeds)
            }
        }
    }
}

fn check_k(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::invalid(format!("k = {k} outside 1..={m}")));
    }
    Ok(())
}

/// Uniform sample of `k` items without replacement.
pub fn select_random<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Result<SeedItemset> {
    check_k(k, m)?;
    let items = rand::seq::index::sample(rng, m, k).into_vec();
    SeedItemset::new(items, m)
}

/// The `k` items with the most interactions among `users`, ties to the lower index.
pub fn select_popular(matrix: &RatingMatrix, users: &[usize], k: usize) -> Result<SeedItemset> {
    check_k(k, matrix.m())?;
    let counts: Vec<f64> = matrix.item_counts(users).into_iter().map(|c| c as f64).collect();
    SeedItemset::new(rank_candidates(&counts, &vec![false; matrix.m()], k), matrix.m())
}

/// Rank-`k` SVD of the users' rows, then Maxvol over the item factor.
pub fn rbmf_select(matrix: &RatingMatrix, users: &[usize], k: usize, delta: f64, seed: u64) -> Result<SeedItemset> {
    if k == 0 || k > users.len().min(matrix.m()) {
        return Err(Error::invalid(format!(
            "k = {k} outside 1..={}",
            users.len().min(matrix.m())
        )));
    }
    let r: DenseMatrix<f64> = matrix.dense_rows(users);
    let svd = truncated_svd(&r, k, SVD_EPSILON, seed)?;
    let chosen = maxvol(&svd.right.transpose(), delta, DEFAULT_MAX_ITER)?;
    SeedItemset::new(chosen.indices, matrix.m())
}

/// Linear reconstruction `r_hat = z X`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDecoder {
    /// `k x m`
    pub x: DenseMatrix<f64>,
    pub seeds: SeedItemset,
}

impl LinearDecoder {
    pub fn predict(&self, z: &[f64]) -> Vec<f64> {
        let z = DenseMatrix::from_vec(1, z.len(), z.to_vec()).expect("row vector");
        z.matmul(&self.x).into_values()
    }
}

impl Predictor for LinearDecoder {
    fn score_batch(&self, feedback: &DenseMatrix<f64>) -> DenseMatrix<f64> {
        feedback.matmul(&self.x)
    }
}

/// Least-squares decoder `X = (R_S^T R_S + lambda I)^{-1} R_S^T R` over the users' rows.
pub fn rbmf_decoder(matrix: &RatingMatrix, users: &[usize], seeds: &SeedItemset) -> Result<LinearDecoder> {
    let r: DenseMatrix<f64> = matrix.dense_rows(users);
    let x = ridge_solve(&r.select_columns(seeds.items()), &r, DEFAULT_RIDGE)?;
    Ok(LinearDecoder {
        x,
        seeds: seeds.clone(),
    })
}

/// A freshly initialized neural decoder trained for the full epoch budget
/// on hard feedback from the given seeds.
pub fn plusplus_decoder<T: Scalar>(
    matrix: &RatingMatrix,
    split: &SplitSpec,
    seeds: &SeedItemset,
    cfg: &TrainConfig,
) -> Result<DecoderParams<T>> {
    let mut init_rng = rng::seeded(rng::derive_seed(cfg.seed, "plusplus-init", 0));
    let theta = DecoderParams::init(seeds.len(), cfg.d, matrix.m(), &mut init_rng);
    Ok(fit_decoder(matrix, &split.train_users, seeds, theta, cfg.epochs, &DecoderFit::from(cfg))?.0)
}

/// Item popularity used as the same score vector for every user.
#[derive(Clone, Debug, PartialEq)]
pub struct Popularity {
    pub counts: Vec<f64>,
}

impl Popularity {
    pub fn from_users(matrix: &RatingMatrix, users: &[usize]) -> Self {
        Self {
            counts: matrix.item_counts(users).into_iter().map(|c| c as f64).collect(),
        }
    }
}

impl Predictor for Popularity {
    fn score_batch(&self, feedback: &DenseMatrix<f64>) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(feedback.rows(), self.counts.len(), |_, j| self.counts[j])
    }
}

/// Items by descending popularity, ties to the lower index, without `excluded`.
pub fn mostpop_ranking(popularity: &Popularity, excluded: &SeedItemset, n: usize) -> Result<Vec<usize>> {
    let m = popularity.counts.len();
    if n == 0 || n > m - excluded.len() {
        return Err(Error::invalid(format!("N = {n} outside 1..={}", m - excluded.len())));
    }
    Ok(rank_candidates(&popularity.counts, &excluded.mask(m), n))
}

/// One decimal item index per line.
pub fn seeds_text(seeds: &SeedItemset) -> String {
    seeds.items().iter().map(|j| format!("{j}\n")).collect()
}

pub fn parse_seeds(text: &str, m: usize, expected_k: Option<usize>) -> Result<SeedItemset> {
    let items = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| Error::MalformedLine {
                line: i + 1,
                reason: format!("{l:?} is not an item index"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = expected_k {
        if items.len() != k {
            return Err(Error::Format(format!("expected {k} seed items, found {}", items.len())));
        }
    }
    SeedItemset::new(items, m)
}

pub fn write_seed_file(path: impl AsRef<Path>, seeds: &SeedItemset) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, seeds_text(seeds)).map_err(|e| Error::io(path, e))
}

pub fn read_seed_file(path: impl AsRef<Path>, m: usize, expected_k: Option<usize>) -> Result<SeedItemset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_seeds(&text, m, expected_k)
}
