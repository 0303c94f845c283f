//! Subcommand implementations. Each returns a summary value; printing
//! happens in [`dispatch`].

pub mod eval;
pub mod grid;
pub mod prepare;
pub mod recommend;
pub mod report;
pub mod train;

use crate::cli::{Cli, Command, ConfigArgs};
use crate::config::RunConfig;
use crate::manifest::data_fingerprint;
use anyhow::{anyhow, bail, Context, Result};
use elicit_core::data::{self, snapshot, split_users, Preprocess, RatingMatrix, SplitSpec};
use std::io::{self, Write};
use std::path::Path;

/// Config file, then dedicated flags, then `--set` overrides.
pub fn resolve_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &args.dataset {
        cfg.dataset = Some(d.clone());
    }
    if let Some(k) = args.k {
        cfg.train.k = k;
    }
    if let Some(s) = args.seed {
        cfg.train.seed = s;
    }
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if let Some(m) = &args.methods {
        cfg.set("methods", m)?;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    for s in &args.set {
        cfg.apply_override(s)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub struct Dataset {
    pub matrix: RatingMatrix,
    pub fingerprint: String,
}

/// Reads a snapshot directory, or prepares a raw file in memory.
pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg
        .dataset
        .as_deref()
        .ok_or_else(|| anyhow!("no dataset given (use --dataset or the dataset key)"))?;
    let matrix = if path.is_dir() {
        snapshot::read_snapshot(path).with_context(|| format!("reading snapshot {}", path.display()))?
    } else if path.is_file() {
        data::prepare(path, &preprocess(cfg)).with_context(|| format!("preparing {}", path.display()))?
    } else {
        bail!("dataset {} does not exist", path.display());
    };
    let fingerprint = data_fingerprint(&matrix);
    Ok(Dataset { matrix, fingerprint })
}

pub fn preprocess(cfg: &RunConfig) -> Preprocess {
    Preprocess {
        delimiter: cfg.format,
        threshold: cfg.threshold,
        min_count: cfg.min_count,
    }
}

pub fn make_split(cfg: &RunConfig, matrix: &RatingMatrix) -> Result<SplitSpec> {
    Ok(split_users(matrix, cfg.test_fraction, cfg.val_fraction, cfg.split_seed)?)
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Prepare(args) => {
            let s = prepare::prepare(&resolve_config(&args)?)?;
            writeln!(out, "{}", s.to_text())?;
        }
        Command::Train(args) => {
            let s = train::train(&resolve_config(&args)?)?;
            writeln!(out, "seeds: {}", s.seed_tokens.join(" "))?;
            writeln!(out, "model written to {}", s.checkpoint.display())?;
        }
        Command::Eval(args) => {
            let extra = eval::parse_seed_args(&args.seeds)?;
            let report = eval::eval(&resolve_config(&args.config)?, args.checkpoint.as_deref(), &extra)?;
            write!(out, "{}", report.to_table())?;
        }
        Command::Grid(args) => {
            let mut cfg = resolve_config(&args.config)?;
            for g in &args.grid {
                let (axis, values) = g
                    .split_once('=')
                    .ok_or_else(|| anyhow!("--grid {g:?} is not key=v1,v2,..."))?;
                cfg.set(&format!("grid.{}", axis.trim()), values)?;
            }
            let outcome = grid::grid(&cfg)?;
            write!(out, "{}", outcome.sweep_table())?;
            if let Some(t) = outcome.temperature_table() {
                writeln!(out)?;
                write!(out, "{t}")?;
            }
        }
        Command::Recommend(args) => {
            let stdin = io::stdin();
            let mut input = stdin.lock();
            let mut prompt = io::stderr();
            let items = recommend::recommend(&args, &mut input, &mut prompt)?;
            for item in items {
                writeln!(out, "{item}")?;
            }
        }
        Command::Report(args) => {
            let text = report::report(&args.reports)?;
            if let Some(path) = &args.out {
                write_file(path, &text)?;
            }
            write!(out, "{text}")?;
        }
    }
    Ok(())
}
