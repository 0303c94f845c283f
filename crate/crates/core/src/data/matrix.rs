use super::records::InteractionRecord;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use std::collections::HashMap;

/// Sparse binary user x item matrix with token maps.
///
/// Rows hold the sorted item indices a user interacted with. Every row is
/// nonempty and every item occurs in at least one row.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingMatrix {
    rows: Vec<Vec<u32>>,
    users: Vec<String>,
    items: Vec<String>,
    item_lookup: HashMap<String, usize>,
}

impl RatingMatrix {
    /// Builds from per-user item lists with generated tokens `u<i>` / `i<j>`.
    pub fn from_rows(rows: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let users = (0..rows.len()).map(|u| format!("u{u}")).collect();
        let items = (0..m).map(|j| format!("i{j}")).collect();
        Self::with_tokens(rows, users, items)
    }

    pub fn with_tokens(rows: Vec<Vec<usize>>, users: Vec<String>, items: Vec<String>) -> Result<Self> {
        if rows.len() != users.len() {
            return Err(Error::Format(format!("{} rows but {} user tokens", rows.len(), users.len())));
        }
        if rows.is_empty() || items.is_empty() {
            return Err(Error::DegenerateDataset("matrix has no users or no items".into()));
        }
        let m = items.len();
        let mut seen = vec![false; m];
        let mut packed = Vec::with_capacity(rows.len());
        for (u, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            if row.is_empty() {
                return Err(Error::DegenerateDataset(format!("user {u} has no interactions")));
            }
            if let Some(&bad) = row.iter().find(|&&j| j >= m) {
                return Err(Error::Format(format!("item index {bad} out of range for {m} items")));
            }
            for &j in &row {
                seen[j] = true;
            }
            packed.push(row.into_iter().map(|j| j as u32).collect());
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::DegenerateDataset(format!("item {j} has no interactions")));
        }
        let item_lookup = items.iter().enumerate().map(|(j, t)| (t.clone(), j)).collect();
        Ok(Self {
            rows: packed,
            users,
            items,
            item_lookup,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn sparsity(&self) -> f64 {
        1.0 - self.nnz() as f64 / (self.n() as f64 * self.m() as f64)
    }

    pub fn row(&self, user: usize) -> &[u32] {
        &self.rows[user]
    }

    pub fn contains(&self, user: usize, item: usize) -> bool {
        self.rows[user].binary_search(&(item as u32)).is_ok()
    }

    pub fn user_tokens(&self) -> &[String] {
        &self.users
    }

    pub fn item_tokens(&self) -> &[String] {
        &self.items
    }

    pub fn item_index(&self, token: &str) -> Option<usize> {
        self.item_lookup.get(token).copied()
    }

    /// Interaction count of every item over the given users.
    pub fn item_counts(&self, users: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.m()];
        for &u in users {
            for &j in &self.rows[u] {
                counts[j as usize] += 1;
            }
        }
        counts
    }

    /// Dense 0/1 rows for the given users.
    pub fn dense_rows<T: Scalar>(&self, users: &[usize]) -> DenseMatrix<T> {
        let mut out = DenseMatrix::zeros(users.len(), self.m());
        for (r, &u) in users.iter().enumerate() {
            let row = out.row_mut(r);
            for &j in &self.rows[u] {
                row[j as usize] = T::one();
            }
        }
        out
    }

    /// The user's ratings on `items`, in the order given.
    pub fn feedback<T: Scalar>(&self, user: usize, items: &[usize]) -> Vec<T> {
        items
            .iter()
            .map(|&j| if self.contains(user, j) { T::one() } else { T::zero() })
            .collect()
    }

    /// One positive record per nonzero, users and items in index order.
    pub fn to_records(&self) -> Vec<InteractionRecord> {
        let mut out = Vec::with_capacity(self.nnz());
        for (u, row) in self.rows.iter().enumerate() {
            for &j in row {
                out.push(InteractionRecord {
                    user: self.users[u].clone(),
                    item: self.items[j as usize].clone(),
                    rating: 1.0,
                    timestamp: None,
                });
            }
        }
        out
    }
}

/// Assigns 0-based indices in order of first appearance and collects rows.
///
/// Only items present in `records` get an index, so no column is empty.
/// Repeated (user, item) pairs collapse to one nonzero.
pub fn build_matrix(records: &[InteractionRecord]) -> Result<RatingMatrix> {
    if records.is_empty() {
        return Err(Error::DegenerateDataset("no records to build a matrix from".into()));
    }
    let mut user_idx: HashMap<&str, usize> = HashMap::new();
    let mut item_idx: HashMap<&str, usize> = HashMap::new();
    let mut users = Vec::new();
    let mut items = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    for r in records {
        let u = *user_idx.entry(r.user.as_str()).or_insert_with(|| {
            users.push(r.user.clone());
            rows.push(Vec::new());
            users.len() - 1
        });
        let j = *item_idx.entry(r.item.as_str()).or_insert_with(|| {
            items.push(r.item.clone());
            items.len() - 1
        });
        rows[u].push(j);
    }
    RatingMatrix::with_tokens(rows, users, items)
}
