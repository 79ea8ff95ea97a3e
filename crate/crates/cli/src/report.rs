//! CSV / JSON writers. Output is a pure function of its input, so
//! identical reports serialize to identical bytes.

use serde::Serialize;

use crate::config::Format;
use crate::run::{RunReport, Summary};
use crate::sweep::SweepReport;
use crate::CliError;

fn csv_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(csv_err)?;
    s.push('\n');
    Ok(s)
}

/// Per-step table: `n, defect, shadow_error, bound, pass`.
pub fn render_run(report: &RunReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.rows {
                w.serialize(row).map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
        }
    }
}

/// Human-readable summary lines, one verdict per check.
pub fn render_summary(s: &Summary) -> String {
    let mut out = format!("trials: {}\nhorizon: {}\nmax_error: {}\n", s.trials, s.horizon, s.max_error);
    if let Some(t) = s.tail_sup {
        out.push_str(&format!("tail_sup: {t}\n"));
    }
    out.push_str(&format!("bound_violations: {}\n", s.bound_violations));
    for c in &s.checks {
        out.push_str(&format!("{}: {}\n", c.name, verdict(c.pass)));
    }
    out.push_str(&format!("overall: {}\n", verdict(s.pass)));
    out
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One row per grid point: parameters, then
/// `max_error, tail_sup, fitted_L, fitted_theta, bound_violations`.
pub fn render_sweep(report: &SweepReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = report.params.clone();
            header.extend(["max_error", "tail_sup", "fitted_L", "fitted_theta", "bound_violations"].map(String::from));
            w.write_record(&header).map_err(csv_err)?;
            for row in &report.rows {
                let mut rec: Vec<String> = row.values.iter().map(f64::to_string).collect();
                rec.extend([
                    row.max_error.to_string(),
                    opt(row.tail_sup),
                    opt(row.fitted_l),
                    opt(row.fitted_theta),
                    row.bound_violations.to_string(),
                ]);
                w.write_record(&rec).map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
        }
    }
}
