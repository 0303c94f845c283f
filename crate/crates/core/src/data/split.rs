use super::RatingMatrix;
use crate::error::{Error, Result};
use crate::rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Disjoint user partition. Each list is sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_users: Vec<usize>,
    pub val_users: Vec<usize>,
    pub test_users: Vec<usize>,
    pub rng_seed: u64,
}

pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_VAL_FRACTION: f64 = 0.1;

pub fn split_users(matrix: &RatingMatrix, test_frac: f64, val_frac_of_train: f64, seed: u64) -> Result<SplitSpec> {
    split_indices(matrix.n(), test_frac, val_frac_of_train, seed)
}

/// Shuffles `0..n` and cuts off `round(test_frac * n)` test users, then
/// `round(val_frac * rest)` validation users.
pub fn split_indices(n: usize, test_frac: f64, val_frac_of_train: f64, seed: u64) -> Result<SplitSpec> {
    for (name, f) in [("test fraction", test_frac), ("validation fraction", val_frac_of_train)] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::invalid(format!("{name} {f} outside (0, 1)")));
        }
    }
    if n < 10 {
        return Err(Error::invalid(format!("need at least 10 users to split, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(seed));
    let n_test = (test_frac * n as f64).round() as usize;
    let rest = n - n_test;
    let n_val = (val_frac_of_train * rest as f64).round() as usize;
    let mut test_users = order[..n_test].to_vec();
    let mut val_users = order[n_test..n_test + n_val].to_vec();
    let mut train_users = order[n_test + n_val..].to_vec();
    test_users.sort_unstable();
    val_users.sort_unstable();
    train_users.sort_unstable();
    Ok(SplitSpec {
        train_users,
        val_users,
        test_users,
        rng_seed: seed,
    })
}
