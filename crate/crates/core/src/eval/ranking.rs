use std::cmp::Ordering;

/// Top `n` items by descending score, ties to the lower index, skipping
/// every item whose `excluded` flag is set.
pub fn rank_candidates(scores: &[f64], excluded: &[bool], n: usize) -> Vec<usize> {
    debug_assert_eq!(scores.len(), excluded.len());
    let mut candidates: Vec<usize> = (0..scores.len()).filter(|&j| !excluded[j]).collect();
    let order = |&a: &usize, &b: &usize| -> Ordering { scores[b].total_cmp(&scores[a]).then(a.cmp(&b)) };
    let n = n.min(candidates.len());
    if n == 0 {
        return Vec::new();
    }
    if n < candidates.len() {
        candidates.select_nth_unstable_by(n - 1, order);
        candidates.truncate(n);
    }
    candidates.sort_unstable_by(order);
    candidates
}
