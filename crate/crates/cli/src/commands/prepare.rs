use super::{create_dir, preprocess, write_file};
use crate::config::RunConfig;
use anyhow::{anyhow, bail, Context, Result};
use elicit_core::data::{self, snapshot};

#[derive(Clone, Debug, PartialEq)]
pub struct PrepareSummary {
    pub users: usize,
    pub items: usize,
    pub nnz: usize,
    pub sparsity: f64,
}

impl PrepareSummary {
    pub fn to_text(&self) -> String {
        format!(
            "users = {}\nitems = {}\ninteractions = {}\nsparsity = {:.6}",
            self.users, self.items, self.nnz, self.sparsity
        )
    }
}

/// Raw file -> snapshot files and `stats.txt` in the output directory.
pub fn prepare(cfg: &RunConfig) -> Result<PrepareSummary> {
    let path = cfg
        .dataset
        .as_deref()
        .ok_or_else(|| anyhow!("prepare needs --dataset pointing at a raw interaction file"))?;
    if path.is_dir() {
        bail!("{} is a directory; prepare expects a raw interaction file", path.display());
    }
    let matrix = data::prepare(path, &preprocess(cfg)).with_context(|| format!("preparing {}", path.display()))?;
    create_dir(&cfg.out)?;
    snapshot::write_snapshot(&matrix, &cfg.out)?;
    let summary = PrepareSummary {
        users: matrix.n(),
        items: matrix.m(),
        nnz: matrix.nnz(),
        sparsity: matrix.sparsity(),
    };
    write_file(&cfg.out.join("stats.txt"), summary.to_text() + "\n")?;
    log::info!("snapshot written to {}", cfg.out.display());
    Ok(summary)
}
