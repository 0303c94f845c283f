//! Interaction ingestion, binarization, the sparse rating matrix and user splits.

mod matrix;
mod records;
pub mod snapshot;
mod split;
pub mod synthetic;

pub use matrix::{build_matrix, RatingMatrix};
pub use records::{binarize, filter_min_ratings, load_interactions, parse_interactions, Delimiter, InteractionRecord};
pub use split::{split_indices, split_users, SplitSpec, DEFAULT_TEST_FRACTION, DEFAULT_VAL_FRACTION};

use crate::error::Result;
use std::path::Path;

/// Preprocessing rules applied between parsing and matrix construction.
#[derive(Clone, Copy, Debug)]
pub struct Preprocess {
    pub delimiter: Delimiter,
    /// Ratings strictly above this become positives.
    pub threshold: f64,
    /// Minimum positives a user needs to be kept.
    pub min_count: usize,
}

impl Default for Preprocess {
    fn default() -> Self {
        Self {
            delimiter: Delimiter::DoubleColon,
            threshold: 3.5,
            min_count: 5,
        }
    }
}

/// `load -> binarize -> filter -> build`.
pub fn prepare(path: impl AsRef<Path>, rules: &Preprocess) -> Result<RatingMatrix> {
    let records = load_interactions(path, rules.delimiter)?;
    let positives = filter_min_ratings(binarize(records, rules.threshold), rules.min_count)?;
    build_matrix(&positives)
}
