//! Portable text snapshot of a [`RatingMatrix`].
//!
//! `matrix.snapshot` starts with `ELICIT-MATRIX v1 n=<n> m=<m> nnz=<nnz>`
//! followed by one `<user_idx>:<item indices>` line per user.
//! `users.map` and `items.map` hold `<token>\t<index>` lines.

use super::RatingMatrix;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub const MATRIX_FILE: &str = "matrix.snapshot";
pub const USERS_FILE: &str = "users.map";
pub const ITEMS_FILE: &str = "items.map";
const MAGIC: &str = "ELICIT-MATRIX v1";

pub fn matrix_text(matrix: &RatingMatrix) -> String {
    let mut out = format!("{MAGIC} n={} m={} nnz={}\n", matrix.n(), matrix.m(), matrix.nnz());
    for u in 0..matrix.n() {
        let _ = write!(out, "{u}:");
        for (p, j) in matrix.row(u).iter().enumerate() {
            if p > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{j}");
        }
        out.push('\n');
    }
    out
}

pub fn map_text(tokens: &[String]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        let _ = writeln!(out, "{t}\t{i}");
    }
    out
}

pub fn write_snapshot(matrix: &RatingMatrix, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, text) in [
        (MATRIX_FILE, matrix_text(matrix)),
        (USERS_FILE, map_text(matrix.user_tokens())),
        (ITEMS_FILE, map_text(matrix.item_tokens())),
    ] {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn read_snapshot(dir: impl AsRef<Path>) -> Result<RatingMatrix> {
    let dir = dir.as_ref();
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
    };
    let users = parse_map(&read(USERS_FILE)?)?;
    let items = parse_map(&read(ITEMS_FILE)?)?;
    let (rows, m) = parse_matrix(&read(MATRIX_FILE)?)?;
    if m != items.len() || rows.len() != users.len() {
        return Err(Error::Format("snapshot dimensions disagree with map files".into()));
    }
    RatingMatrix::with_tokens(rows, users, items)
}

fn header_field(header: &str, key: &str) -> Result<usize> {
    header
        .split_whitespace()
        .find_map(|f| f.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format(format!("snapshot header lacks {key}=")))
}

pub fn parse_matrix(text: &str) -> Result<(Vec<Vec<usize>>, usize)> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with(MAGIC) {
        return Err(Error::Format(format!("bad snapshot header {header:?}")));
    }
    let n = header_field(header, "n")?;
    let m = header_field(header, "m")?;
    let nnz = header_field(header, "nnz")?;
    let mut rows = Vec::with_capacity(n);
    for (expected, line) in lines.enumerate() {
        let (idx, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::Format(format!("snapshot row {expected} lacks ':'")))?;
        if idx.parse::<usize>().ok() != Some(expected) {
            return Err(Error::Format(format!("snapshot row {expected} labelled {idx:?}")));
        }
        let row = rest
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Format(format!("bad item index {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != n || rows.iter().map(Vec::len).sum::<usize>() != nnz {
        return Err(Error::Format("snapshot body disagrees with header".into()));
    }
    Ok((rows, m))
}

pub fn parse_map(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let (token, idx) = line
            .rsplit_once('\t')
            .ok_or_else(|| Error::Format(format!("map line {} lacks a tab", i + 1)))?;
        if idx.parse::<usize>().ok() != Some(i) {
            return Err(Error::Format(format!("map line {} has index {idx:?}", i + 1)));
        }
        tokens.push(token.to_string());
    }
    Ok(tokens)
}
