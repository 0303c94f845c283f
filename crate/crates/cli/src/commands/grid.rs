use super::train::save_model;
use super::{create_dir, load_dataset, make_split, write_file};
use crate::config::RunConfig;
use anyhow::{bail, Context, Result};
use elicit_core::eval::{evaluate_method, Metric};
use elicit_core::model::fit_dre;
use elicit_core::Fitted;
use std::fmt::Write as _;

pub const SWEEP_FILE: &str = "sweep.tsv";
pub const BEST_CONFIG_FILE: &str = "best.conf";
pub const TEMPERATURE_FILE: &str = "temperature.tsv";
/// Subdirectory holding the model of the selected cell.
pub const BEST_DIR: &str = "best";

#[derive(Clone, Debug)]
pub struct CellResult {
    /// One value per axis, as written in the grid.
    pub values: Vec<String>,
    pub config: RunConfig,
    pub best_epoch: Option<usize>,
    pub val_ndcg: f64,
    pub val_precision: f64,
    pub test_ndcg: f64,
    pub test_precision: f64,
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub axes: Vec<String>,
    pub cells: Vec<CellResult>,
    /// Index of the cell with the highest validation NDCG.
    pub best: usize,
    /// Cells dropped because the grid exceeded the cap.
    pub dropped: usize,
    pub cutoff: usize,
}

/// Every combination of axis values; the last axis varies fastest.
pub fn cartesian(grid: &[(String, Vec<String>)]) -> Vec<Vec<String>> {
    grid.iter().fold(vec![Vec::new()], |acc, (_, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut cell = prefix.clone();
                    cell.push(v.clone());
                    cell
                })
            })
            .collect()
    })
}

fn is_t0_marker(axis: &str, value: &str) -> bool {
    axis == "te" && value.eq_ignore_ascii_case("t0")
}

/// The base configuration with one grid cell applied. `te = T0` is resolved
/// after every other axis so it follows a swept `t0`.
pub fn cell_config(base: &RunConfig, axes: &[String], values: &[String]) -> Result<RunConfig> {
    let mut cfg = base.without_grid();
    for (axis, value) in axes.iter().zip(values) {
        if !is_t0_marker(axis, value) {
            cfg.set(axis, value)?;
        }
    }
    if axes.iter().zip(values).any(|(a, v)| is_t0_marker(a, v)) {
        cfg.train.te = cfg.train.t0;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn grid(cfg: &RunConfig) -> Result<GridOutcome> {
    if cfg.grid.is_empty() {
        bail!("grid is empty; give at least one --grid key=v1,v2,... or grid.<key> entry");
    }
    let axes: Vec<String> = cfg.grid.iter().map(|(a, _)| a.clone()).collect();
    let mut combos = cartesian(&cfg.grid);
    let dropped = combos.len().saturating_sub(cfg.grid_cap);
    if dropped > 0 {
        log::warn!(
            "grid has {} cells, over the cap of {}; only the first {} are run",
            combos.len(),
            cfg.grid_cap,
            cfg.grid_cap
        );
        combos.truncate(cfg.grid_cap);
    }
    let ds = load_dataset(cfg)?;
    let split = make_split(cfg, &ds.matrix)?;
    let n = cfg.grid_cutoff;

    let mut cells = Vec::with_capacity(combos.len());
    let mut best: Option<(usize, f64, Fitted)> = None;
    for (i, values) in combos.into_iter().enumerate() {
        let cell_cfg = cell_config(cfg, &axes, &values)?;
        let label: Vec<String> = axes.iter().zip(&values).map(|(a, v)| format!("{a}={v}")).collect();
        log::info!("cell {}: {}", i + 1, label.join(" "));
        let fitted = fit_dre::<f32>(&ds.matrix, &split, &cell_cfg.train)
            .with_context(|| format!("training cell {}", label.join(" ")))?;
        let val = evaluate_method(&fitted.decoder, &ds.matrix, &split.val_users, &fitted.seeds, &[n])?;
        let test = evaluate_method(&fitted.decoder, &ds.matrix, &split.test_users, &fitted.seeds, &[n])?;
        let cell = CellResult {
            values,
            config: cell_cfg,
            best_epoch: fitted.best_epoch,
            val_ndcg: val.mean(Metric::Ndcg, n).unwrap_or(f64::NAN),
            val_precision: val.mean(Metric::Precision, n).unwrap_or(f64::NAN),
            test_ndcg: test.mean(Metric::Ndcg, n).unwrap_or(f64::NAN),
            test_precision: test.mean(Metric::Precision, n).unwrap_or(f64::NAN),
        };
        if best.as_ref().map_or(true, |(_, v, _)| cell.val_ndcg > *v) {
            best = Some((i, cell.val_ndcg, fitted));
        }
        cells.push(cell);
    }
    let (best, _, fitted) = best.expect("at least one cell");
    let outcome = GridOutcome { axes, cells, best, dropped, cutoff: n };

    create_dir(&cfg.out)?;
    write_file(&cfg.out.join(SWEEP_FILE), outcome.sweep_table())?;
    let chosen = &outcome.cells[best];
    let header = format!(
        "# best grid cell by validation NDCG@{n} = {:.6}\n",
        chosen.val_ndcg
    );
    write_file(&cfg.out.join(BEST_CONFIG_FILE), header + &chosen.config.to_text())?;
    if let Some(t) = outcome.temperature_table() {
        write_file(&cfg.out.join(TEMPERATURE_FILE), t)?;
    }
    let best_dir = cfg.out.join(BEST_DIR);
    create_dir(&best_dir)?;
    save_model(&best_dir, &ds, &chosen.config, &fitted)?;
    Ok(outcome)
}

impl GridOutcome {
    pub fn best_cell(&self) -> &CellResult {
        &self.cells[self.best]
    }

    /// One row per cell with validation and test scores.
    pub fn sweep_table(&self) -> String {
        let n = self.cutoff;
        let mut s = self.axes.join("\t");
        let _ = writeln!(s, "\tbest_epoch\tval_NDCG@{n}\tval_P@{n}\ttest_NDCG@{n}\ttest_P@{n}");
        for c in &self.cells {
            let best_epoch = c.best_epoch.map_or_else(|| "-".to_string(), |e| e.to_string());
            let _ = writeln!(
                s,
                "{}\t{best_epoch}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
                c.values.join("\t"),
                c.val_ndcg,
                c.val_precision,
                c.test_ndcg,
                c.test_precision
            );
        }
        s
    }

    /// Test P@N with final temperatures as rows and initial temperatures as
    /// columns. Other swept axes are resolved by validation NDCG. `None`
    /// unless both temperatures were swept.
    pub fn temperature_table(&self) -> Option<String> {
        let t0_axis = self.axes.iter().position(|a| a == "t0")?;
        let te_axis = self.axes.iter().position(|a| a == "te")?;
        let mut t0s: Vec<&str> = Vec::new();
        let mut tes: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !t0s.contains(&c.values[t0_axis].as_str()) {
                t0s.push(&c.values[t0_axis]);
            }
            if !tes.contains(&c.values[te_axis].as_str()) {
                tes.push(&c.values[te_axis]);
            }
        }
        let mut s = format!("P@{}\tT0={}\n", self.cutoff, t0s.join("\tT0="));
        for te in &tes {
            let mut row = if te.eq_ignore_ascii_case("t0") {
                "TE=T0".to_string()
            } else {
                format!("TE={te}")
            };
            for t0 in &t0s {
                let pick = self
                    .cells
                    .iter()
                    .filter(|c| c.values[t0_axis] == *t0 && c.values[te_axis] == *te)
                    .max_by(|a, b| a.val_ndcg.total_cmp(&b.val_ndcg));
                match pick {
                    Some(c) => {
                        let _ = write!(row, "\t{:.4}", c.test_precision);
                    }
                    None => row.push_str("\t-"),
                }
            }
            s.push_str(&row);
            s.push('\n');
        }
        Some(s)
    }
}
