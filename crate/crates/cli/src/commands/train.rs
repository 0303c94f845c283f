use super::{create_dir, load_dataset, make_split, write_file, Dataset};
use crate::config::RunConfig;
use crate::manifest::{sha256_hex, Manifest};
use anyhow::{Context, Result};
use elicit_core::baselines::seeds_text;
use elicit_core::data::snapshot;
use elicit_core::model::{fit_dre, Checkpoint, EpochRecord};
use elicit_core::Fitted;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const CHECKPOINT_FILE: &str = "model.dre";
pub const MANIFEST_FILE: &str = "model.manifest";
pub const SEEDS_FILE: &str = "seeds.txt";
pub const HISTORY_FILE: &str = "history.tsv";
pub const SPLIT_FILE: &str = "split.json";

#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub seeds: Vec<usize>,
    pub seed_tokens: Vec<String>,
    pub best_epoch: Option<usize>,
    pub checkpoint: PathBuf,
    pub history: Vec<EpochRecord>,
}

pub fn train(cfg: &RunConfig) -> Result<TrainSummary> {
    let ds = load_dataset(cfg)?;
    let split = make_split(cfg, &ds.matrix)?;
    log::info!(
        "training on {} users ({} validation), m = {}, k = {}",
        split.train_users.len(),
        split.val_users.len(),
        ds.matrix.m(),
        cfg.train.k
    );
    let fitted = fit_dre::<f32>(&ds.matrix, &split, &cfg.train).context("training failed")?;
    create_dir(&cfg.out)?;
    write_file(&cfg.out.join(SPLIT_FILE), serde_json::to_string_pretty(&split)?)?;
    save_model(&cfg.out, &ds, cfg, &fitted)
}

/// Checkpoint, manifest, seed list, history and item map.
pub fn save_model(dir: &Path, ds: &Dataset, cfg: &RunConfig, fitted: &Fitted) -> Result<TrainSummary> {
    let checkpoint = Checkpoint {
        encoder: fitted.encoder.clone(),
        decoder: fitted.decoder.clone(),
        seeds: fitted.seeds.clone(),
    };
    let bytes = checkpoint.to_bytes()?;
    let path = dir.join(CHECKPOINT_FILE);
    write_file(&path, &bytes)?;
    let manifest = Manifest {
        data_fingerprint: ds.fingerprint.clone(),
        checkpoint_sha256: sha256_hex(&bytes),
        users: ds.matrix.n(),
        items: ds.matrix.m(),
        nnz: ds.matrix.nnz(),
        best_epoch: fitted.best_epoch,
        config: cfg.without_grid().to_text(),
    };
    write_file(&dir.join(MANIFEST_FILE), manifest.to_text())?;
    write_file(&dir.join(SEEDS_FILE), seeds_text(&fitted.seeds))?;
    write_file(&dir.join(HISTORY_FILE), history_text(&fitted.history, cfg.train.val_cutoff))?;
    write_file(&dir.join(snapshot::ITEMS_FILE), snapshot::map_text(ds.matrix.item_tokens()))?;
    let tokens = ds.matrix.item_tokens();
    Ok(TrainSummary {
        seeds: fitted.seeds.items().to_vec(),
        seed_tokens: fitted.seeds.items().iter().map(|&j| tokens[j].clone()).collect(),
        best_epoch: fitted.best_epoch,
        checkpoint: path,
        history: fitted.history.clone(),
    })
}

pub fn history_text(history: &[EpochRecord], val_cutoff: usize) -> String {
    let mut s = format!("epoch\ttau\ttrain_loss\tval_ndcg@{val_cutoff}\n");
    for r in history {
        let val = r.val_ndcg.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(s, "{}\t{:.6}\t{:.6}\t{val}", r.epoch, r.tau, r.train_loss);
    }
    s
}
