use super::train::MANIFEST_FILE;
use super::{create_dir, load_dataset, make_split, write_file};
use crate::config::{RunConfig, ALL_METHODS};
use crate::manifest::{sha256_hex, Manifest};
use anyhow::{anyhow, bail, Context, Result};
use elicit_core::baselines::{
    plusplus_decoder, rbmf_decoder, rbmf_select, read_seed_file, select_popular, select_random, Popularity,
};
use elicit_core::data::{RatingMatrix, SplitSpec};
use elicit_core::eval::{aggregate_runs, evaluate_method, EvalReport, MetricTable, Pairing, RunResult};
use elicit_core::model::{fit_dre, Checkpoint, SeedItemset, TrainConfig};
use elicit_core::rng::{derive_seed, seeded};
use std::path::{Path, PathBuf};

pub const REPORT_TSV: &str = "report.tsv";
pub const REPORT_JSON: &str = "report.json";

/// Parses `NAME=path` pairs given with `--seeds`.
pub fn parse_seed_args(args: &[String]) -> Result<Vec<(String, PathBuf)>> {
    let mut out: Vec<(String, PathBuf)> = Vec::new();
    for a in args {
        let (name, path) = a
            .split_once('=')
            .ok_or_else(|| anyhow!("--seeds {a:?} is not NAME=path"))?;
        let name = name.trim();
        if name.is_empty() {
            bail!("--seeds {a:?} has an empty name");
        }
        if ALL_METHODS.iter().any(|m| m.eq_ignore_ascii_case(name)) || out.iter().any(|(n, _)| n == name) {
            bail!("method name {name:?} is already taken");
        }
        out.push((name.to_string(), PathBuf::from(path.trim())));
    }
    Ok(out)
}

/// A checkpoint that has been checked against the dataset.
pub fn load_checkpoint(path: &Path, fingerprint: &str) -> Result<Checkpoint> {
    let bytes = std::fs::read(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
    let manifest_path = path.with_file_name(MANIFEST_FILE);
    let manifest = Manifest::read(&manifest_path)?;
    if manifest.checkpoint_sha256 != sha256_hex(&bytes) {
        bail!("{} does not match the digest in {}", path.display(), manifest_path.display());
    }
    if manifest.data_fingerprint != fingerprint {
        bail!(
            "checkpoint {} was trained on data {} but the dataset is {}",
            path.display(),
            manifest.data_fingerprint,
            fingerprint
        );
    }
    Checkpoint::from_bytes(&bytes).with_context(|| format!("decoding {}", path.display()))
}

struct RunContext<'a> {
    matrix: &'a RatingMatrix,
    split: &'a SplitSpec,
    cfg: &'a RunConfig,
    run: u64,
}

impl RunContext<'_> {
    fn seed(&self, method: &str) -> u64 {
        derive_seed(self.cfg.train.seed, method, self.run)
    }

    fn train_cfg(&self, method: &str) -> TrainConfig {
        TrainConfig {
            seed: self.seed(method),
            ..self.cfg.train.clone()
        }
    }

    fn test(&self, p: &dyn elicit_core::eval::Predictor, seeds: &SeedItemset) -> Result<MetricTable> {
        Ok(evaluate_method(p, self.matrix, &self.split.test_users, seeds, &self.cfg.cutoffs)?)
    }

    fn plusplus(&self, method: &str, seeds: &SeedItemset) -> Result<MetricTable> {
        let theta = plusplus_decoder::<f32>(self.matrix, self.split, seeds, &self.train_cfg(method))?;
        self.test(&theta, seeds)
    }
}

/// Runs every configured method `runs` times on the fixed test split and
/// writes `report.tsv` / `report.json` to the output directory.
pub fn eval(cfg: &RunConfig, checkpoint: Option<&Path>, extra: &[(String, PathBuf)]) -> Result<EvalReport> {
    let ds = load_dataset(cfg)?;
    let matrix = &ds.matrix;
    let split = make_split(cfg, matrix)?;
    let k = cfg.train.k;
    let trained = checkpoint.map(|p| load_checkpoint(p, &ds.fingerprint)).transpose()?;
    if let Some(c) = &trained {
        if c.k() != k {
            bail!("checkpoint has k = {} but the configuration asks for k = {k}", c.k());
        }
    }
    let extra_seeds = extra
        .iter()
        .map(|(name, path)| {
            read_seed_file(path, matrix.m(), Some(k))
                .with_context(|| format!("seed file for {name}"))
                .map(|s| (name.clone(), s))
        })
        .collect::<Result<Vec<_>>>()?;
    let train_users = &split.train_users;
    let popularity = Popularity::from_users(matrix, train_users);

    let mut runs = Vec::with_capacity(cfg.runs);
    for run in 0..cfg.runs as u64 {
        let ctx = RunContext { matrix, split: &split, cfg, run };
        let mut dre: Option<(elicit_core::Decoder, SeedItemset)> = None;
        if cfg.methods.iter().any(|m| m == "DRE") {
            dre = Some(match &trained {
                Some(c) => (c.decoder.clone(), c.seeds.clone()),
                None => {
                    log::info!("run {}/{}: DRE", run + 1, cfg.runs);
                    let f = fit_dre::<f32>(matrix, &split, &ctx.train_cfg("DRE"))?;
                    (f.decoder, f.seeds)
                }
            });
        }
        let mut rbmf_seeds: Option<SeedItemset> = None;
        let mut rbmf = |ctx: &RunContext| -> Result<SeedItemset> {
            if rbmf_seeds.is_none() {
                rbmf_seeds = Some(rbmf_select(matrix, train_users, k, cfg.rbmf_delta, ctx.seed("RBMF"))?);
            }
            Ok(rbmf_seeds.clone().unwrap())
        };
        let mut tables = Vec::new();
        for method in &cfg.methods {
            log::info!("run {}/{}: {method}", run + 1, cfg.runs);
            let table = match method.as_str() {
                "MOSTPOP" => {
                    let excluded = match &dre {
                        Some((_, s)) => s.clone(),
                        None => SeedItemset::new(Vec::new(), matrix.m())?,
                    };
                    ctx.test(&popularity, &excluded)?
                }
                "RAN++" => {
                    let seeds = select_random(matrix.m(), k, &mut seeded(ctx.seed("RAN++")))?;
                    ctx.plusplus("RAN++", &seeds)?
                }
                "POP++" => ctx.plusplus("POP++", &select_popular(matrix, train_users, k)?)?,
                "RBMF" => {
                    let seeds = rbmf(&ctx)?;
                    ctx.test(&rbmf_decoder(matrix, train_users, &seeds)?, &seeds)?
                }
                "RBMF++" => ctx.plusplus("RBMF++", &rbmf(&ctx)?)?,
                "DRE" => {
                    let (theta, seeds) = dre.as_ref().expect("DRE fitted above");
                    ctx.test(theta, seeds)?
                }
                other => bail!("unknown method {other:?}"),
            };
            tables.push((method.clone(), table));
        }
        for (name, seeds) in &extra_seeds {
            log::info!("run {}/{}: {name}", run + 1, cfg.runs);
            tables.push((name.clone(), ctx.plusplus(name, seeds)?));
        }
        runs.push(RunResult {
            seed: derive_seed(cfg.train.seed, "run", run),
            methods: tables,
        });
    }

    let pairings = if cfg.methods.iter().any(|m| m == "DRE") && runs[0].methods.len() > 1 {
        vec![Pairing::AgainstBest("DRE".into())]
    } else {
        Vec::new()
    };
    let report = aggregate_runs(&runs, &pairings)?;
    create_dir(&cfg.out)?;
    write_file(&cfg.out.join(REPORT_TSV), report.to_table())?;
    write_file(&cfg.out.join(REPORT_JSON), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}
