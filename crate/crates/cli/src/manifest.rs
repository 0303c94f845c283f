//! Sidecar text describing a checkpoint: what it was trained on and how.

use anyhow::{anyhow, bail, Context, Result};
use elicit_core::data::{snapshot, RatingMatrix};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const HEADER: &str = "# elicit model manifest";
const CONFIG_MARKER: &str = "[config]";

/// SHA-256 of the canonical snapshot text of a matrix.
pub fn data_fingerprint(matrix: &RatingMatrix) -> String {
    hex(&Sha256::digest(snapshot::matrix_text(matrix).as_bytes()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub data_fingerprint: String,
    pub checkpoint_sha256: String,
    pub users: usize,
    pub items: usize,
    pub nnz: usize,
    pub best_epoch: Option<usize>,
    /// Run configuration in its canonical text form.
    pub config: String,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{HEADER}");
        let _ = writeln!(s, "format = DRE1");
        let _ = writeln!(s, "data_fingerprint = {}", self.data_fingerprint);
        let _ = writeln!(s, "checkpoint_sha256 = {}", self.checkpoint_sha256);
        let _ = writeln!(s, "users = {}", self.users);
        let _ = writeln!(s, "items = {}", self.items);
        let _ = writeln!(s, "nnz = {}", self.nnz);
        let best = self.best_epoch.map_or_else(|| "-".to_string(), |e| e.to_string());
        let _ = writeln!(s, "best_epoch = {best}");
        let _ = writeln!(s, "{CONFIG_MARKER}");
        s.push_str(&self.config);
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (head, config) = text
            .split_once(&format!("{CONFIG_MARKER}\n"))
            .ok_or_else(|| anyhow!("manifest has no {CONFIG_MARKER} section"))?;
        let mut get = std::collections::HashMap::new();
        for line in head.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("bad manifest line {line:?}"))?;
            get.insert(k.trim().to_string(), v.trim().to_string());
        }
        let field = |k: &str| get.get(k).cloned().ok_or_else(|| anyhow!("manifest lacks {k}"));
        if field("format")? != "DRE1" {
            bail!("unsupported checkpoint format {}", field("format")?);
        }
        let number = |k: &str| -> Result<usize> { field(k)?.parse().with_context(|| format!("manifest field {k}")) };
        let best = field("best_epoch")?;
        Ok(Self {
            data_fingerprint: field("data_fingerprint")?,
            checkpoint_sha256: field("checkpoint_sha256")?,
            users: number("users")?,
            items: number("items")?,
            nnz: number("nnz")?,
            best_epoch: if best == "-" {
                None
            } else {
                Some(best.parse().context("manifest field best_epoch")?)
            },
            config: config.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in manifest {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = Manifest {
            data_fingerprint: "ab".repeat(32),
            checkpoint_sha256: "cd".repeat(32),
            users: 3,
            items: 4,
            nnz: 5,
            best_epoch: Some(19),
            config: "k = 2\n".into(),
        };
        assert_eq!(Manifest::parse(&m.to_text()).unwrap(), m);
        let none = Manifest { best_epoch: None, ..m };
        assert_eq!(Manifest::parse(&none.to_text()).unwrap(), none);
    }

    #[test]
    fn fingerprint_is_sha256_hex() {
        // SHA-256 of the empty string
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let a = RatingMatrix::from_rows(vec![vec![0], vec![1]], 2).unwrap();
        let b = RatingMatrix::from_rows(vec![vec![0, 1], vec![1]], 2).unwrap();
        assert_ne!(data_fingerprint(&a), data_fingerprint(&b));
        assert_eq!(data_fingerprint(&a).len(), 64);
    }
}
