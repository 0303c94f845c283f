use anyhow::{bail, Context, Result};
use elicit_core::eval::{improvement_pct, significance_stars, EvalReport, Metric};
use std::fmt::Write as _;
use std::path::PathBuf;

const OURS: &str = "DRE";

/// Means per method, then DRE's gain over the best other method with
/// stars from the pooled paired t-test. Stars are only given to gains.
pub fn render(report: &EvalReport) -> Result<String> {
    if report.methods.len() < 2 {
        bail!("report has {} method(s); a comparison needs at least two", report.methods.len());
    }
    if !report.methods.iter().any(|m| m == OURS) {
        bail!("report has no {OURS} column");
    }
    let mut s = String::from("metric");
    for m in &report.methods {
        let _ = write!(s, "\t{m}");
    }
    s.push_str("\tImprov.\n");
    for metric in Metric::ALL {
        for &n in &report.cutoffs {
            let _ = write!(s, "{metric}@{n}");
            for m in &report.methods {
                match report.cell(m, metric, n) {
                    Some(c) => {
                        let _ = write!(s, "\t{:.4}", c.mean);
                    }
                    None => s.push_str("\t-"),
                }
            }
            s.push('\t');
            s.push_str(&improvement_cell(report, metric, n));
            s.push('\n');
        }
    }
    Ok(s)
}

fn improvement_cell(report: &EvalReport, metric: Metric, n: usize) -> String {
    let ours = report.cell(OURS, metric, n).map(|c| c.mean);
    let best = report
        .methods
        .iter()
        .filter(|m| *m != OURS)
        .filter_map(|m| report.cell(m, metric, n).map(|c| c.mean))
        .fold(None::<f64>, |acc, v| Some(acc.map_or(v, |a| a.max(v))));
    let (Some(ours), Some(best)) = (ours, best) else {
        return "-".into();
    };
    if best <= 0.0 {
        return "-".into();
    }
    let gain = improvement_pct(ours, best);
    let stars = match report.comparison(OURS, metric, n).and_then(|c| c.pooled) {
        Some(t) if ours > best => significance_stars(t.p),
        _ => "",
    };
    format!("{gain:.2}%{stars}")
}

/// Renders each `report.json`; several reports are separated by a header line.
pub fn report(paths: &[PathBuf]) -> Result<String> {
    let mut out = String::new();
    for (i, path) in paths.iter().enumerate() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let report: EvalReport =
            serde_json::from_str(&text).with_context(|| format!("{} is not an evaluation report", path.display()))?;
        if paths.len() > 1 {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {}", path.display());
        }
        out.push_str(&render(&report).with_context(|| format!("in {}", path.display()))?);
    }
    Ok(out)
}
