//! CSV and text renderings of scenario and sweep results.
//!
//! CSV numbers carry 6 significant digits; the text grid uses 2 decimals.
//! Undefined values are written as `NA`.

use crate::deployment::SweepRow;
use crate::error::{Error, Result};
use crate::experiments::ScenarioResult;
use crate::metrics::MetricKind;
use crate::summary::{EstimateSummary, Estimator};
use crate::synthetic::Scenario;

pub const METRICS_CSV_HEADER: [&str; 7] = [
    "scenario",
    "metric",
    "estimator",
    "mean",
    "lo",
    "hi",
    "n_undefined",
];

pub const CALIBRATION_CSV_HEADER: [&str; 10] = [
    "scenario",
    "estimator",
    "bin_index",
    "bin_lo",
    "bin_hi",
    "mean_pred",
    "prevalence",
    "weight_mass",
    "lo",
    "hi",
];

pub const SWEEP_CSV_HEADER: [&str; 8] = [
    "swept_param",
    "param_value",
    "estimator",
    "mean",
    "lo",
    "hi",
    "mean_observed_fraction",
    "n_undefined",
];

pub const NA: &str = "NA";

/// Formats `x` with 6 significant digits in positional notation.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return NA.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can bump the magnitude (e.g. 9.999995 -> 10.00000).
    if s.trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > 6
        && decimals > 0
    {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    s
}

fn opt_sig6(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), fmt_sig6)
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Csv(crate::error::CsvError(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn summary_fields(s: &EstimateSummary) -> [String; 3] {
    match s.interval {
        Some(i) => [fmt_sig6(i.mean), fmt_sig6(i.lo), fmt_sig6(i.hi)],
        None => [NA.into(), NA.into(), NA.into()],
    }
}

/// Metric grid as CSV, one row per (scenario, metric, estimator).
pub fn metrics_csv(results: &[ScenarioResult]) -> Result<String> {
    csv_string(|w| {
        w.write_record(METRICS_CSV_HEADER)?;
        for r in results {
            for t in &r.triplets {
                for e in Estimator::ALL {
                    let s = t.estimate(e);
                    let [mean, lo, hi] = summary_fields(s);
                    w.write_record([
                        r.spec.scenario.name(),
                        t.metric.name(),
                        e.name(),
                        &mean,
                        &lo,
                        &hi,
                        &s.n_undefined.to_string(),
                    ])?;
                }
            }
        }
        Ok(())
    })
}

pub fn calibration_csv(results: &[ScenarioResult]) -> Result<String> {
    csv_string(|w| {
        w.write_record(CALIBRATION_CSV_HEADER)?;
        for r in results {
            for c in &r.calibration {
                for b in &c.bins {
                    let (prev, lo, hi) = match b.prevalence.interval {
                        Some(i) => (fmt_sig6(i.mean), fmt_sig6(i.lo), fmt_sig6(i.hi)),
                        None => (NA.into(), NA.into(), NA.into()),
                    };
                    w.write_record([
                        r.spec.scenario.name(),
                        c.estimator.name(),
                        &b.index.to_string(),
                        &fmt_sig6(b.lo),
                        &fmt_sig6(b.hi),
                        &opt_sig6(b.mean_pred),
                        &prev,
                        &fmt_sig6(b.weight_mass),
                        &lo,
                        &hi,
                    ])?;
                }
            }
        }
        Ok(())
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    csv_string(|w| {
        w.write_record(SWEEP_CSV_HEADER)?;
        for row in rows {
            for e in Estimator::ALL {
                let s = row.estimate(e);
                let [mean, lo, hi] = summary_fields(s);
                w.write_record([
                    row.swept_param.name(),
                    &fmt_sig6(row.param_value),
                    e.name(),
                    &mean,
                    &lo,
                    &hi,
                    &fmt_sig6(row.mean_observed_fraction),
                    &s.n_undefined.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

/// `"0.75 [0.74, 0.77]"`, or `"NA"`. Flagged summaries get a trailing `*`.
pub fn format_cell(s: &EstimateSummary) -> String {
    let mut cell = match s.interval {
        Some(i) => format!("{:.2} [{:.2}, {:.2}]", i.mean, i.lo, i.hi),
        None => NA.to_string(),
    };
    if s.flagged() {
        cell.push('*');
    }
    cell
}

/// Human-readable grid: metric x estimator rows, one column per scenario.
pub fn metrics_table(results: &[ScenarioResult]) -> String {
    let mut metrics: Vec<MetricKind> = Vec::new();
    for r in results {
        for t in &r.triplets {
            if !metrics.contains(&t.metric) {
                metrics.push(t.metric);
            }
        }
    }
    metrics.sort();

    let mut header = vec!["Metric".to_string(), "Estimator".to_string()];
    header.extend(results.iter().map(|r| {
        format!(
            "Scenario {} ({})",
            r.spec.scenario.number(),
            r.spec.scenario.name()
        )
    }));
    let mut rows = vec![header];
    for m in &metrics {
        for (k, e) in Estimator::ALL.into_iter().enumerate() {
            let mut row = vec![
                if k == 0 {
                    m.display_name().to_string()
                } else {
                    String::new()
                },
                e.display_name().to_string(),
            ];
            row.extend(results.iter().map(|r| {
                r.triplet(*m)
                    .map_or_else(|| NA.to_string(), |t| format_cell(t.estimate(e)))
            }));
            rows.push(row);
        }
    }

    let ncol = rows[0].len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join(" | ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    if results
        .iter()
        .any(|r| r.triplets.iter().any(|t| t.flagged()))
    {
        out.push_str("* more than 10% of replicates undefined\n");
    }
    out
}

/// The full 6 metric x 5 scenario x 3 estimator grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Report {
    pub text: String,
    pub csv: String,
}

/// Renders the full grid. Requires all five scenarios, in standard order,
/// each with all six metrics.
pub fn table1_report(results: &[ScenarioResult]) -> Result<Table1Report> {
    for (i, &scenario) in Scenario::ALL.iter().enumerate() {
        match results.get(i) {
            Some(r) if r.spec.scenario == scenario => {
                if r.triplets.len() != MetricKind::ALL.len() {
                    return Err(Error::InvalidArgument(format!(
                        "scenario {scenario} is missing metrics"
                    )));
                }
            }
            _ => return Err(Error::MissingScenario(scenario.name().to_string())),
        }
    }
    if results.len() != Scenario::ALL.len() {
        return Err(Error::InvalidArgument(format!(
            "expected 5 scenario results, got {}",
            results.len()
        )));
    }
    Ok(Table1Report {
        text: metrics_table(results),
        csv: metrics_csv(results)?,
    })
}
