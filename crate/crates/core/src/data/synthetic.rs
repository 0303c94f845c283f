//! Planted-cluster interaction data for tests and demos.

use super::RatingMatrix;
use crate::error::Result;
use crate::rng;
use rand::Rng;

/// Parameters of [`clustered`].
#[derive(Clone, Copy, Debug)]
pub struct ClusterSpec {
    pub users: usize,
    pub items: usize,
    pub clusters: usize,
    /// Like probability of the most popular item of a block.
    pub p_max: f64,
    /// Like probability of the least popular item of a block.
    pub p_min: f64,
    /// Probability that a user also takes up each other block as a whole.
    pub cross: f64,
    /// Like probability of any item outside the blocks a user takes up.
    pub noise: f64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            users: 300,
            items: 30,
            clusters: 3,
            p_max: 0.95,
            p_min: 0.3,
            cross: 0.4,
            noise: 0.02,
        }
    }
}

impl ClusterSpec {
    /// Block of contiguous items liked by cluster `c`.
    pub fn block(&self, c: usize) -> std::ops::Range<usize> {
        let size = self.items / self.clusters;
        c * size..(c + 1) * size
    }

    pub fn cluster_of_item(&self, item: usize) -> usize {
        (item / (self.items / self.clusters)).min(self.clusters - 1)
    }
}

/// Users split evenly into disjoint clusters; each cluster likes one
/// contiguous item block, with like probability falling linearly from
/// `p_max` to `p_min` across the block. Each user independently takes up
/// every other block with probability `cross`, liking it the same way.
/// Every user likes at least the head item of their own block.
pub fn clustered(spec: &ClusterSpec, seed: u64) -> Result<RatingMatrix> {
    let mut rng = rng::seeded(seed);
    let size = spec.items / spec.clusters;
    let mut rows = Vec::with_capacity(spec.users);
    for u in 0..spec.users {
        let c = u * spec.clusters / spec.users;
        let block = spec.block(c);
        let taken: Vec<bool> = (0..spec.clusters).map(|b| b == c || rng.random::<f64>() < spec.cross).collect();
        let mut row = Vec::new();
        for j in 0..spec.items {
            let p = if j < size * spec.clusters && taken[spec.cluster_of_item(j)] {
                let block = spec.block(spec.cluster_of_item(j));
                let pos = (j - block.start) as f64 / (size.max(2) - 1) as f64;
                spec.p_max + (spec.p_min - spec.p_max) * pos
            } else {
                spec.noise
            };
            if rng.random::<f64>() < p {
                row.push(j);
            }
        }
        if !row.iter().any(|j| block.contains(j)) {
            row.push(block.start);
        }
        rows.push(row);
    }
    RatingMatrix::from_rows(rows, spec.items)
}
