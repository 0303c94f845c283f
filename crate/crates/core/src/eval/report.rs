//! Multi-run aggregation and the tabular / structured report.

use super::metrics::Metric;
use super::protocol::MetricTable;
use super::stats::{paired_t_test, TTest};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Every method's per-user table from one seeded repetition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub methods: Vec<(String, MetricTable)>,
}

impl RunResult {
    pub fn table(&self, method: &str) -> Option<&MetricTable> {
        self.methods.iter().find(|(name, _)| name == method).map(|(_, t)| t)
    }
}

/// Which methods get compared with a paired t-test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// The method against whichever other method has the best mean in
    /// each metric/cutoff cell.
    AgainstBest(String),
    Between(String, String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: String,
    pub metric: Metric,
    pub cutoff: usize,
    pub mean: f64,
    pub std: f64,
    /// User-averaged value of each run.
    pub per_run: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method: String,
    pub against: String,
    pub metric: Metric,
    pub cutoff: usize,
    /// Test over the users shared by both methods within each run.
    pub per_run: Vec<Option<TTest>>,
    /// Test over those pairs concatenated across runs.
    pub pooled: Option<TTest>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub methods: Vec<String>,
    pub cutoffs: Vec<usize>,
    pub run_seeds: Vec<u64>,
    /// Users skipped per method, summed over runs.
    pub skipped: Vec<(String, usize)>,
    pub cells: Vec<Cell>,
    pub comparisons: Vec<Comparison>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Scores of users evaluated by both tables, aligned by user.
fn aligned(a: &MetricTable, b: &MetricTable, metric: Metric, cutoff: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let (sa, sb) = (a.scores(metric, cutoff)?, b.scores(metric, cutoff)?);
    let (mut i, mut j) = (0, 0);
    let (mut xa, mut xb) = (Vec::new(), Vec::new());
    while i < a.users.len() && j < b.users.len() {
        match a.users[i].cmp(&b.users[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                xa.push(sa[i]);
                xb.push(sb[j]);
                i += 1;
                j += 1;
            }
        }
    }
    Some((xa, xb))
}

pub fn aggregate_runs(runs: &[RunResult], pairings: &[Pairing]) -> Result<EvalReport> {
    let first = runs.first().ok_or_else(|| Error::invalid("no runs to aggregate"))?;
    let methods: Vec<String> = first.methods.iter().map(|(m, _)| m.clone()).collect();
    let cutoffs = first
        .methods
        .first()
        .map(|(_, t)| t.cutoffs.clone())
        .ok_or_else(|| Error::invalid("run has no methods"))?;
    for run in runs {
        let names: Vec<&String> = run.methods.iter().map(|(m, _)| m).collect();
        if names.len() != methods.len() || names.iter().zip(&methods).any(|(a, b)| *a != b) {
            return Err(Error::invalid(format!(
                "run {} evaluates {names:?}, expected {methods:?}",
                run.seed
            )));
        }
        if run.methods.iter().any(|(_, t)| t.cutoffs != cutoffs) {
            return Err(Error::invalid("runs disagree on cutoffs"));
        }
    }

    let mut cells = Vec::new();
    for method in &methods {
        for metric in Metric::ALL {
            for &cutoff in &cutoffs {
                let per_run: Vec<f64> = runs
                    .iter()
                    .map(|r| r.table(method).and_then(|t| t.mean(metric, cutoff)).unwrap_or(f64::NAN))
                    .collect();
                let (mean, std) = mean_std(&per_run);
                cells.push(Cell {
                    method: method.clone(),
                    metric,
                    cutoff,
                    mean,
                    std,
                    per_run,
                });
            }
        }
    }
    let cell_mean = |method: &str, metric: Metric, cutoff: usize| {
        cells
            .iter()
            .find(|c| c.method == method && c.metric == metric && c.cutoff == cutoff)
            .map(|c| c.mean)
    };

    let mut comparisons = Vec::new();
    for pairing in pairings {
        for metric in Metric::ALL {
            for &cutoff in &cutoffs {
                let (a, b) = match pairing {
                    Pairing::Between(a, b) => (a.clone(), b.clone()),
                    Pairing::AgainstBest(a) => {
                        let best = methods
                            .iter()
                            .filter(|m| *m != a)
                            .filter_map(|m| cell_mean(m, metric, cutoff).map(|v| (m, v)))
                            .fold(None::<(&String, f64)>, |acc, (m, v)| match acc {
                                Some((_, bv)) if bv >= v => acc,
                                _ => Some((m, v)),
                            });
                        match best {
                            Some((b, _)) => (a.clone(), b.clone()),
                            None => continue,
                        }
                    }
                };
                if !methods.contains(&a) || !methods.contains(&b) {
                    return Err(Error::invalid(format!("pairing names unknown method: {a} / {b}")));
                }
                let mut pooled_a = Vec::new();
                let mut pooled_b = Vec::new();
                let mut per_run = Vec::new();
                for run in runs {
                    let (ta, tb) = (run.table(&a).unwrap(), run.table(&b).unwrap());
                    let (xa, xb) = aligned(ta, tb, metric, cutoff).unwrap_or_default();
                    per_run.push(paired_t_test(&xa, &xb).ok());
                    pooled_a.extend(xa);
                    pooled_b.extend(xb);
                }
                comparisons.push(Comparison {
                    method: a,
                    against: b,
                    metric,
                    cutoff,
                    per_run,
                    pooled: paired_t_test(&pooled_a, &pooled_b).ok(),
                });
            }
        }
    }

    let skipped = methods
        .iter()
        .map(|m| (m.clone(), runs.iter().filter_map(|r| r.table(m)).map(|t| t.skipped).sum()))
        .collect();
    Ok(EvalReport {
        methods,
        cutoffs,
        run_seeds: runs.iter().map(|r| r.seed).collect(),
        skipped,
        cells,
        comparisons,
    })
}

impl EvalReport {
    pub fn runs(&self) -> usize {
        self.run_seeds.len()
    }

    pub fn cell(&self, method: &str, metric: Metric, cutoff: usize) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.metric == metric && c.cutoff == cutoff)
    }

    pub fn comparison(&self, method: &str, metric: Metric, cutoff: usize) -> Option<&Comparison> {
        self.comparisons
            .iter()
            .find(|c| c.method == method && c.metric == metric && c.cutoff == cutoff)
    }

    /// Tab-separated `method, metric, N, mean, std, p_vs_best`, one row per cell.
    pub fn to_table(&self) -> String {
        let mut out = String::from("method\tmetric\tN\tmean\tstd\tp_vs_best\n");
        for c in &self.cells {
            let p = self
                .comparison(&c.method, c.metric, c.cutoff)
                .and_then(|cmp| cmp.pooled)
                .map_or_else(|| "-".to_string(), |t| format!("{:.4e}", t.p));
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
                c.method, c.metric, c.cutoff, c.mean, c.std, p
            );
        }
        out
    }
}

/// Relative gain of `ours` over `baseline`, in percent.
pub fn improvement_pct(ours: f64, baseline: f64) -> f64 {
    (ours / baseline - 1.0) * 100.0
}

/// `***`, `**`, `*` for `p <= 0.005`, `0.01`, `0.05`; empty otherwise.
pub fn significance_stars(p: f64) -> &'static str {
    if p <= 0.005 {
        "***"
    } else if p <= 0.01 {
        "**"
    } else if p <= 0.05 {
        "*"
    } else {
        ""
    }
}
