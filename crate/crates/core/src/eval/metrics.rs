use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "P")]
    Precision,
    #[serde(rename = "NDCG")]
    Ndcg,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Precision, Metric::Ndcg];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Precision => "P",
            Metric::Ndcg => "NDCG",
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" | "precision" => Ok(Metric::Precision),
            "NDCG" | "ndcg" => Ok(Metric::Ndcg),
            other => Err(Error::invalid(format!("unknown metric {other:?}"))),
        }
    }
}

fn check_cutoff(omega: &[usize], n: usize) -> Result<()> {
    if n == 0 || n > omega.len() {
        return Err(Error::invalid(format!("cutoff {n} outside 1..={}", omega.len())));
    }
    Ok(())
}

/// Fraction of the top `n` ranked items that are relevant.
pub fn precision_at(omega: &[usize], relevant: &HashSet<usize>, n: usize) -> Result<f64> {
    check_cutoff(omega, n)?;
    let hits = omega[..n].iter().filter(|j| relevant.contains(j)).count();
    Ok(hits as f64 / n as f64)
}

fn discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

/// Binary-relevance NDCG with a `log2(rank + 1)` discount, normalized by
/// the DCG of placing every relevant item first.
pub fn ndcg_at(omega: &[usize], relevant: &HashSet<usize>, n: usize) -> Result<f64> {
    check_cutoff(omega, n)?;
    if relevant.is_empty() {
        return Err(Error::invalid("NDCG is undefined for an empty relevant set"));
    }
    let dcg: f64 = omega[..n]
        .iter()
        .enumerate()
        .filter(|(_, j)| relevant.contains(j))
        .fold(0.0, |acc, (i, _)| acc + discount(i + 1));
    let ideal: f64 = (1..=n.min(relevant.len())).map(discount).sum();
    Ok(dcg / ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(items: &[usize]) -> HashSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn precision_examples() {
        // omega = [a, b, c, d], V = {a, c}
        assert_eq!(precision_at(&[0, 1, 2, 3], &set(&[0, 2]), 2).unwrap(), 0.5);
        assert_eq!(precision_at(&[0, 1, 2], &set(&[0, 1, 2, 9]), 3).unwrap(), 1.0);
        assert_eq!(precision_at(&[0, 1, 2], &set(&[]), 3).unwrap(), 0.0);
        assert!(precision_at(&[0, 1], &set(&[0]), 3).is_err());
    }

    #[test]
    fn ndcg_examples() {
        // hits at ranks 1 and 3, |V| = 2
        let v = ndcg_at(&[10, 11, 12], &set(&[10, 12]), 3).unwrap();
        let dcg = 1.0 + 1.0 / 4f64.log2();
        let idcg = 1.0 + 1.0 / 3f64.log2();
        assert!((dcg - 1.5).abs() < 1e-15);
        assert!((idcg - 1.630_929_753_571_457).abs() < 1e-12);
        assert!((v - 0.9198).abs() < 1e-4);
        assert_eq!(ndcg_at(&[4, 5, 6], &set(&[4, 5]), 3).unwrap(), 1.0);
        assert_eq!(ndcg_at(&[4, 5, 6], &set(&[9]), 3).unwrap(), 0.0);
        assert!(ndcg_at(&[4, 5, 6], &set(&[]), 3).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_tail_invariant(
            perm in Just((0..20usize).collect::<Vec<_>>()).prop_shuffle(),
            relevant in proptest::collection::hash_set(0..20usize, 1..8),
            n in 1usize..20,
        ) {
            let p = precision_at(&perm, &relevant, n).unwrap();
            let g = ndcg_at(&perm, &relevant, n).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
            let mut tail_swapped = perm.clone();
            tail_swapped[n..].reverse();
            prop_assert_eq!(p, precision_at(&tail_swapped, &relevant, n).unwrap());
            prop_assert_eq!(g, ndcg_at(&tail_swapped, &relevant, n).unwrap());
        }

        #[test]
        fn promoting_a_hit_never_hurts(
            perm in Just((0..15usize).collect::<Vec<_>>()).prop_shuffle(),
            relevant in proptest::collection::hash_set(0..15usize, 1..6),
            n in 2usize..15,
        ) {
            let before = ndcg_at(&perm, &relevant, n).unwrap();
            if let Some(pos) = (1..n).find(|&i| relevant.contains(&perm[i]) && !relevant.contains(&perm[i - 1])) {
                let mut better = perm.clone();
                better.swap(pos, pos - 1);
                prop_assert!(ndcg_at(&better, &relevant, n).unwrap() >= before);
            }
        }
    }

    #[test]
    fn ideal_permutation_scores_exactly_one() {
        let rel = set(&[3, 7, 1]);
        for n in 1..=6 {
            assert_eq!(ndcg_at(&[3, 7, 1, 0, 2, 4], &rel, n).unwrap(), 1.0);
        }
    }
}
