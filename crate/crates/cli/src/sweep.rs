//! Parameter sweeps over the cartesian product of a config's grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shadowkit::verify::fit_decay;

use crate::config::ExperimentConfig;
use crate::run::{run, Check};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub max_error: f64,
    pub tail_sup: Option<f64>,
    /// Envelope fit of the per-step worst error; absent when the trace
    /// has too few positive entries.
    pub fitted_l: Option<f64>,
    pub fitted_theta: Option<f64>,
    pub bound_violations: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub params: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub pass: bool,
}

/// Grid points in row-major order over the (sorted) parameter names.
pub fn grid_points(cfg: &ExperimentConfig) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    if cfg.sweep.is_empty() || cfg.sweep.values().any(Vec::is_empty) {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    let names: Vec<String> = cfg.sweep.keys().cloned().collect();
    let mut points = vec![Vec::new()];
    for values in cfg.sweep.values() {
        points = points
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok((names, points))
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepReport, CliError> {
    let (params, points) = grid_points(cfg)?;
    let rows = points
        .par_iter()
        .map(|values| {
            let mut c = cfg.clone();
            for (k, &v) in params.iter().zip(values) {
                c.set_param(k, v)?;
            }
            c.validate()?;
            let (report, _) = run(&c)?;
            let worst: Vec<f64> = report.rows.iter().map(|r| r.shadow_error).collect();
            let fit = fit_decay(&worst).ok();
            Ok(SweepRow {
                values: values.clone(),
                max_error: report.summary.max_error,
                tail_sup: report.summary.tail_sup,
                fitted_l: fit.map(|f| f.l),
                fitted_theta: fit.map(|f| f.theta),
                bound_violations: report.summary.bound_violations,
                pass: report.summary.pass,
                checks: report.summary.checks,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(SweepReport { pass: rows.iter().all(|r| r.pass), params, rows })
}
