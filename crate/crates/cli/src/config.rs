//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key below may
//! also be set from the command line with `--set key=value`; the common
//! ones have dedicated flags. Later settings win.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `dataset` | - | raw interaction file or prepared snapshot directory |
//! | `format` | `::` | raw file delimiter: `::`, `tab`, `comma` |
//! | `threshold` | 3.5 | ratings strictly above count as positive |
//! | `min_count` | 5 | minimum positives per user |
//! | `test_fraction` | 0.2 | share of users held out for testing |
//! | `val_fraction` | 0.1 | share of the remaining users used for validation |
//! | `split_seed` | 0 | seed of the user split, fixed across runs and sweeps |
//! | `k`, `d`, `lr`, `epochs`, `batch_size`, `t0`, `te`, `retrain_epochs`, `seed`, `val_every`, `val_cutoff` | see [`TrainConfig`] | training |
//! | `methods` | all six | comma-separated evaluation methods |
//! | `cutoffs` | `10,20,50,100` | ranking cutoffs N |
//! | `runs` | 5 | seeded repetitions in `eval` |
//! | `out` | `out` | output directory |
//! | `rbmf_delta` | 0.01 | Maxvol dominance tolerance |
//! | `grid.<key>` | - | comma-separated sweep values of `<key>`; `te` accepts `T0` |
//! | `grid_cap` | 64 | maximum number of grid cells to run |
//! | `grid_cutoff` | 20 | N of the validation NDCG that picks the best cell, and of the sweep table |

use anyhow::{anyhow, bail, Context, Result};
use elicit_core::data::Delimiter;
use elicit_core::model::TrainConfig;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const ALL_METHODS: [&str; 6] = ["MOSTPOP", "RAN++", "POP++", "RBMF", "RBMF++", "DRE"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub format: Delimiter,
    pub threshold: f64,
    pub min_count: usize,
    pub test_fraction: f64,
    pub val_fraction: f64,
    pub split_seed: u64,
    pub train: TrainConfig,
    pub methods: Vec<String>,
    pub cutoffs: Vec<usize>,
    pub runs: usize,
    pub out: PathBuf,
    pub rbmf_delta: f64,
    /// Sweep axes in declaration order.
    pub grid: Vec<(String, Vec<String>)>,
    pub grid_cap: usize,
    pub grid_cutoff: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            format: Delimiter::DoubleColon,
            threshold: 3.5,
            min_count: 5,
            test_fraction: 0.2,
            val_fraction: 0.1,
            split_seed: 0,
            train: TrainConfig::default(),
            methods: ALL_METHODS.iter().map(|m| m.to_string()).collect(),
            cutoffs: vec![10, 20, 50, 100],
            runs: 5,
            out: PathBuf::from("out"),
            rbmf_delta: 0.01,
            grid: Vec::new(),
            grid_cap: 64,
            grid_cutoff: 20,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value {value:?} for {key}: {e}"))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse(key, v))
        .collect()
}

/// Keys that a grid may sweep.
pub const GRID_KEYS: [&str; 10] = [
    "k",
    "d",
    "lr",
    "epochs",
    "batch_size",
    "t0",
    "te",
    "retrain_epochs",
    "seed",
    "val_every",
];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)
            .with_context(|| format!("in config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| anyhow!("override {assignment:?} is not key=value"))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.train;
        match key {
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "format" => self.format = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "min_count" => self.min_count = parse(key, value)?,
            "test_fraction" => self.test_fraction = parse(key, value)?,
            "val_fraction" => self.val_fraction = parse(key, value)?,
            "split_seed" => self.split_seed = parse(key, value)?,
            "k" => t.k = parse(key, value)?,
            "d" => t.d = parse(key, value)?,
            "lr" => t.lr = parse(key, value)?,
            "epochs" => t.epochs = parse(key, value)?,
            "batch_size" => t.batch_size = parse(key, value)?,
            "t0" => t.t0 = parse(key, value)?,
            "te" => t.te = parse(key, value)?,
            "retrain_epochs" => t.retrain_epochs = parse(key, value)?,
            "seed" => t.seed = parse(key, value)?,
            "val_every" => t.val_every = parse(key, value)?,
            "val_cutoff" => t.val_cutoff = parse(key, value)?,
            "methods" => self.methods = parse_methods(value)?,
            "cutoffs" => self.cutoffs = parse_list(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "rbmf_delta" => self.rbmf_delta = parse(key, value)?,
            "grid_cap" => self.grid_cap = parse(key, value)?,
            "grid_cutoff" => self.grid_cutoff = parse(key, value)?,
            _ => match key.strip_prefix("grid.") {
                Some(axis) => self.set_grid(axis, value)?,
                None => bail!("unknown config key {key:?}"),
            },
        }
        Ok(())
    }

    fn set_grid(&mut self, axis: &str, value: &str) -> Result<()> {
        if !GRID_KEYS.contains(&axis) {
            bail!("cannot sweep {axis:?}; sweepable keys are {}", GRID_KEYS.join(", "));
        }
        let values: Vec<String> = value
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            bail!("grid.{axis} has no values");
        }
        // validate each value against a scratch config
        for v in &values {
            let mut probe = self.clone();
            if !(axis == "te" && v.eq_ignore_ascii_case("t0")) {
                probe.set(axis, v)?;
            }
        }
        match self.grid.iter_mut().find(|(a, _)| a == axis) {
            Some(slot) => slot.1 = values,
            None => self.grid.push((axis.to_string(), values)),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.train;
        if !self.threshold.is_finite() {
            bail!("threshold must be finite");
        }
        if self.min_count == 0 {
            bail!("min_count must be at least 1");
        }
        for (name, f) in [("test_fraction", self.test_fraction), ("val_fraction", self.val_fraction)] {
            if !(f > 0.0 && f < 1.0) {
                bail!("{name} must lie in (0, 1), got {f}");
            }
        }
        if t.k == 0 || t.d == 0 || t.epochs == 0 || t.batch_size == 0 || t.val_cutoff == 0 {
            bail!("k, d, epochs, batch_size and val_cutoff must be positive");
        }
        if !(t.lr > 0.0 && t.lr.is_finite()) {
            bail!("lr must be positive");
        }
        if !(t.te > 0.0 && t.t0 >= t.te && t.t0.is_finite()) {
            bail!("temperatures must satisfy t0 >= te > 0");
        }
        if self.methods.is_empty() {
            bail!("no methods selected");
        }
        if self.cutoffs.is_empty() || self.cutoffs.contains(&0) {
            bail!("cutoffs must be positive");
        }
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        if !(self.rbmf_delta >= 0.0) {
            bail!("rbmf_delta must be non-negative");
        }
        if self.grid_cap == 0 || self.grid_cutoff == 0 {
            bail!("grid_cap and grid_cutoff must be positive");
        }
        Ok(())
    }

    /// Canonical text form; parsing it back yields the same configuration.
    pub fn to_text(&self) -> String {
        let t = &self.train;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(d) = &self.dataset {
            kv("dataset", d.display().to_string());
        }
        kv("format", format_name(self.format).to_string());
        kv("threshold", self.threshold.to_string());
        kv("min_count", self.min_count.to_string());
        kv("test_fraction", self.test_fraction.to_string());
        kv("val_fraction", self.val_fraction.to_string());
        kv("split_seed", self.split_seed.to_string());
        kv("k", t.k.to_string());
        kv("d", t.d.to_string());
        kv("lr", t.lr.to_string());
        kv("epochs", t.epochs.to_string());
        kv("batch_size", t.batch_size.to_string());
        kv("t0", t.t0.to_string());
        kv("te", t.te.to_string());
        kv("retrain_epochs", t.retrain_epochs.to_string());
        kv("seed", t.seed.to_string());
        kv("val_every", t.val_every.to_string());
        kv("val_cutoff", t.val_cutoff.to_string());
        kv("methods", self.methods.join(","));
        kv(
            "cutoffs",
            self.cutoffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
        );
        kv("runs", self.runs.to_string());
        kv("out", self.out.display().to_string());
        kv("rbmf_delta", self.rbmf_delta.to_string());
        kv("grid_cap", self.grid_cap.to_string());
        kv("grid_cutoff", self.grid_cutoff.to_string());
        for (axis, values) in &self.grid {
            kv(&format!("grid.{axis}"), values.join(","));
        }
        s
    }

    /// The configuration without the sweep, for a single grid cell.
    pub fn without_grid(&self) -> Self {
        Self {
            grid: Vec::new(),
            ..self.clone()
        }
    }
}

pub fn format_name(d: Delimiter) -> &'static str {
    match d {
        Delimiter::DoubleColon => "::",
        Delimiter::Tab => "tab",
        Delimiter::Comma => "comma",
    }
}

fn parse_methods(value: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for m in value.split(',').map(str::trim).filter(|m| !m.is_empty()) {
        let canonical = ALL_METHODS
            .iter()
            .find(|known| known.eq_ignore_ascii_case(m))
            .ok_or_else(|| anyhow!("unknown method {m:?}; known methods are {}", ALL_METHODS.join(", ")))?;
        if !out.iter().any(|o| o == canonical) {
            out.push(canonical.to_string());
        }
    }
    Ok(out)
}
