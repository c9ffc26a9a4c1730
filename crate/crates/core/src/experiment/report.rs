//! Report files: `trials.csv`, `summary.txt`, `histogram.csv`.
//!
//! Floats are written with 17 fractional digits so values survive the
//! write/parse roundtrip exactly; wall-clock timings are deliberately
//! excluded so identical configs produce bit-identical files.

use std::fs;
use std::path::Path;

use super::{ExperimentReport, Method, TrialRecord};
use crate::error::{Error, Result};

/// `trials.csv` column order.
const TRIALS_HEADER: &str = "vector_id,block_index,n,m,method,seed,status,nmse,alpha";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.17e}")).unwrap_or_default()
}

pub fn write_report(
    report: &ExperimentReport,
    records: &[TrialRecord],
    out_dir: &Path,
) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut trials = String::from(TRIALS_HEADER);
    trials.push('\n');
    for r in records {
        trials.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.vector_id,
            r.block_index,
            r.n,
            r.m,
            r.method,
            r.seed,
            r.status,
            fmt_opt(r.nmse),
            fmt_opt(r.alpha),
        ));
    }
    let trials_path = out_dir.join("trials.csv");
    fs::write(&trials_path, trials).map_err(|e| Error::io(&trials_path, e))?;

    let summary_path = out_dir.join("summary.txt");
    fs::write(&summary_path, render_summary(report)).map_err(|e| Error::io(&summary_path, e))?;

    let mut hist = String::from("bin_low,bin_high,count_bp,count_scbp\n");
    for bin in &report.histogram {
        let high = if bin.high.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.17e}", bin.high)
        };
        hist.push_str(&format!(
            "{:.17e},{},{},{}\n",
            bin.low, high, bin.count_bp, bin.count_scbp
        ));
    }
    let hist_path = out_dir.join("histogram.csv");
    fs::write(&hist_path, hist).map_err(|e| Error::io(&hist_path, e))
}

pub fn render_summary(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str("method  trials  optimal  failed  nmse_mean                nmse_variance\n");
    for s in &report.stats {
        out.push_str(&format!(
            "{:<7} {:<7} {:<8} {:<7} {:<24} {}\n",
            s.method.to_string(),
            s.trials,
            s.optimal,
            s.failures,
            s.nmse_mean
                .map(|v| format!("{v:.17e}"))
                .unwrap_or_else(|| "n/a".into()),
            s.nmse_variance
                .map(|v| format!("{v:.17e}"))
                .unwrap_or_else(|| "n/a".into()),
        ));
    }
    if let Some(p) = report.improvement_mean_pct {
        out.push_str(&format!("improvement_mean_pct = {p:.17e}\n"));
    }
    if let Some(p) = report.improvement_variance_pct {
        out.push_str(&format!("improvement_variance_pct = {p:.17e}\n"));
    }
    out.push_str("variance is the population variance over optimal trials;\n");
    out.push_str("failed trials are excluded from moments and counted in the overflow bin.\n");
    out
}

/// Parse a `trials.csv` back into records (timings are not stored and come
/// back as zero).
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRIALS_HEADER => {}
        Some((_, header)) => {
            return Err(Error::parse(
                &source,
                1,
                format!("unexpected header {header:?}, wanted {TRIALS_HEADER:?}"),
            ))
        }
        None => return Err(Error::parse(&source, 1, "empty trials file")),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::parse(
                &source,
                line_no,
                format!("expected 9 fields, found {}", fields.len()),
            ));
        }
        let parse_num = |field: &str, what: &str| -> Result<u64> {
            field
                .parse()
                .map_err(|_| Error::parse(&source, line_no, format!("bad {what}: {field:?}")))
        };
        let opt_f64 = |field: &str, what: &str| -> Result<Option<f64>> {
            if field.is_empty() {
                Ok(None)
            } else {
                field
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::parse(&source, line_no, format!("bad {what}: {field:?}")))
            }
        };
        let method: Method = fields[4]
            .parse()
            .map_err(|_| Error::parse(&source, line_no, format!("bad method {:?}", fields[4])))?;
        let status = fields[6]
            .parse()
            .map_err(|_| Error::parse(&source, line_no, format!("bad status {:?}", fields[6])))?;
        records.push(TrialRecord {
            vector_id: fields[0].to_string(),
            block_index: parse_num(fields[1], "block_index")? as usize,
            n: parse_num(fields[2], "n")? as usize,
            m: parse_num(fields[3], "m")? as usize,
            method,
            seed: parse_num(fields[5], "seed")?,
            status,
            nmse: opt_f64(fields[7], "nmse")?,
            alpha: opt_f64(fields[8], "alpha")?,
            solve_time: 0.0,
        });
    }
    Ok(records)
}
