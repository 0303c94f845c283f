//! Simulated elicitation: each held-out user answers the seed items with
//! their true ratings, the predictor ranks the remaining items, and the
//! ranking is scored against the user's other positives.

use super::metrics::{ndcg_at, precision_at, Metric};
use super::ranking::rank_candidates;
use crate::data::RatingMatrix;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{decode, DecoderParams, SeedItemset};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const DEFAULT_CUTOFFS: [usize; 4] = [10, 20, 50, 100];
const BATCH: usize = 512;

/// Maps feedback on the seeds (one row per user, `k` columns) to a score
/// for every item.
pub trait Predictor {
    fn score_batch(&self, feedback: &DenseMatrix<f64>) -> DenseMatrix<f64>;
}

impl<T: Scalar> Predictor for DecoderParams<T> {
    fn score_batch(&self, feedback: &DenseMatrix<f64>) -> DenseMatrix<f64> {
        decode(self, &feedback.cast::<T>()).cast()
    }
}

/// Per-user metric values of one method on one user set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    /// Users that were scored, ascending.
    pub users: Vec<usize>,
    /// Users left out because none of their positives are candidates.
    pub skipped: usize,
    pub cutoffs: Vec<usize>,
    /// `precision[c][i]` is P@cutoffs[c] of `users[i]`.
    pub precision: Vec<Vec<f64>>,
    pub ndcg: Vec<Vec<f64>>,
}

impl MetricTable {
    pub fn scores(&self, metric: Metric, cutoff: usize) -> Option<&[f64]> {
        let c = self.cutoffs.iter().position(|&n| n == cutoff)?;
        Some(match metric {
            Metric::Precision => &self.precision[c],
            Metric::Ndcg => &self.ndcg[c],
        })
    }

    pub fn mean(&self, metric: Metric, cutoff: usize) -> Option<f64> {
        let s = self.scores(metric, cutoff)?;
        Some(s.iter().sum::<f64>() / s.len() as f64)
    }
}

pub fn evaluate_method<P: Predictor + ?Sized>(
    predictor: &P,
    matrix: &RatingMatrix,
    users: &[usize],
    seeds: &SeedItemset,
    cutoffs: &[usize],
) -> Result<MetricTable> {
    let m = matrix.m();
    let max_cutoff = cutoffs.iter().copied().max().unwrap_or(0);
    if max_cutoff == 0 || max_cutoff > m - seeds.len() {
        return Err(Error::invalid(format!(
            "cutoffs {cutoffs:?} must lie in 1..={} (candidate items)",
            m - seeds.len()
        )));
    }
    if users.is_empty() {
        return Err(Error::invalid("no users to evaluate"));
    }
    let excluded = seeds.mask(m);
    let mut evaluable = Vec::with_capacity(users.len());
    let mut truths = Vec::with_capacity(users.len());
    let mut skipped = 0;
    let mut sorted_users = users.to_vec();
    sorted_users.sort_unstable();
    for &u in &sorted_users {
        let truth: HashSet<usize> = matrix
            .row(u)
            .iter()
            .map(|&j| j as usize)
            .filter(|&j| !excluded[j])
            .collect();
        if truth.is_empty() {
            skipped += 1;
        } else {
            evaluable.push(u);
            truths.push(truth);
        }
    }
    if evaluable.is_empty() {
        return Err(Error::DegenerateEvaluation { skipped });
    }

    let mut precision = vec![Vec::with_capacity(evaluable.len()); cutoffs.len()];
    let mut ndcg = vec![Vec::with_capacity(evaluable.len()); cutoffs.len()];
    for (chunk_users, chunk_truths) in evaluable.chunks(BATCH).zip(truths.chunks(BATCH)) {
        let feedback = DenseMatrix::from_fn(chunk_users.len(), seeds.len(), |i, s| {
            if matrix.contains(chunk_users[i], seeds.items()[s]) {
                1.0
            } else {
                0.0
            }
        });
        let scores = predictor.score_batch(&feedback);
        assert_eq!(scores.shape(), (chunk_users.len(), m), "predictor returned wrong shape");
        for (i, truth) in chunk_truths.iter().enumerate() {
            let omega = rank_candidates(scores.row(i), &excluded, max_cutoff);
            assert!(omega.iter().all(|&j| !excluded[j]), "seed item in ranking");
            assert!(truth.iter().all(|&j| !excluded[j]), "seed item in ground truth");
            for (c, &n) in cutoffs.iter().enumerate() {
                precision[c].push(precision_at(&omega, truth, n)?);
                ndcg[c].push(ndcg_at(&omega, truth, n)?);
            }
        }
    }
    Ok(MetricTable {
        users: evaluable,
        skipped,
        cutoffs: cutoffs.to_vec(),
        precision,
        ndcg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scores every positive of the user above everything else; needs to
    /// know the user, so it reads it off a side table keyed by feedback row.
    struct Oracle<'a> {
        matrix: &'a RatingMatrix,
        users: Vec<usize>,
    }

    impl Predictor for Oracle<'_> {
        fn score_batch(&self, feedback: &DenseMatrix<f64>) -> DenseMatrix<f64> {
            DenseMatrix::from_fn(feedback.rows(), self.matrix.m(), |i, j| {
                if self.matrix.contains(self.users[i], j) {
                    1.0
                } else {
                    0.0
                }
            })
        }
    }

    struct Constant(Vec<f64>);

    impl Predictor for Constant {
        fn score_batch(&self, feedback: &DenseMatrix<f64>) -> DenseMatrix<f64> {
            DenseMatrix::from_fn(feedback.rows(), self.0.len(), |_, j| self.0[j])
        }
    }

    fn toy() -> RatingMatrix {
        RatingMatrix::from_rows(
            vec![vec![0, 1, 2], vec![0, 3, 4, 5], vec![0], vec![1, 5]],
            6,
        )
        .unwrap()
    }

    #[test]
    fn perfect_predictor_bounds() {
        let m = toy();
        let seeds = SeedItemset::new(vec![0], 6).unwrap();
        let users = vec![0, 1, 3];
        let oracle = Oracle { matrix: &m, users: users.clone() };
        let t = evaluate_method(&oracle, &m, &users, &seeds, &[2, 3]).unwrap();
        assert_eq!(t.users, users);
        for (i, &u) in users.iter().enumerate() {
            let v = m.row(u).iter().filter(|&&j| j != 0).count();
            assert_eq!(t.precision[0][i], v.min(2) as f64 / 2.0);
            assert_eq!(t.ndcg[1][i], 1.0);
        }
    }

    #[test]
    fn user_with_only_seed_positives_is_skipped() {
        let m = toy();
        let seeds = SeedItemset::new(vec![0], 6).unwrap();
        let t = evaluate_method(&Constant(vec![0.0; 6]), &m, &[0, 2], &seeds, &[1]).unwrap();
        assert_eq!(t.users, vec![0]);
        assert_eq!(t.skipped, 1);
        assert!(matches!(
            evaluate_method(&Constant(vec![0.0; 6]), &m, &[2], &seeds, &[1]),
            Err(Error::DegenerateEvaluation { skipped: 1 })
        ));
    }

    #[test]
    fn non_personalized_ranking_still_varies_by_user() {
        let m = toy();
        let seeds = SeedItemset::new(vec![0], 6).unwrap();
        let popular = Constant(vec![9.0, 5.0, 1.0, 1.0, 1.0, 4.0]);
        let t = evaluate_method(&popular, &m, &[0, 1, 3], &seeds, &[1]).unwrap();
        assert_eq!(t.precision[0], vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn cutoff_beyond_candidates_rejected() {
        let m = toy();
        let seeds = SeedItemset::new(vec![0, 1], 6).unwrap();
        assert!(evaluate_method(&Constant(vec![0.0; 6]), &m, &[0], &seeds, &[5]).is_err());
    }
}
