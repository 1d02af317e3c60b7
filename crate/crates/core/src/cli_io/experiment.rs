//! Measured lifetimes and model/measurement comparison.
//!
//! Data files have a `d_um,tau_s` header with an optional `err_s` column.

use super::config::RunContext;
use super::sweep::{evaluate_point, SweepVariable};
use super::table::{to_json, Format};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentPoint {
    /// Atom-surface distance [m].
    pub d: f64,
    pub tau_measured: f64,
    pub error_bar: Option<f64>,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("bad header {found:?}, expected d_um,tau_s[,err_s]")]
    Header { found: Vec<String> },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

pub fn load_experiment_points(text: &str) -> Result<Vec<ExperimentPoint>, DataError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Row { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let with_errors = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["d_um", "tau_s"] => false,
        ["d_um", "tau_s", "err_s"] => true,
        _ => return Err(DataError::Header { found: header }),
    };

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, DataError> {
            let raw = record.get(i).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| DataError::Row { line, message: format!("{name}: '{raw}' is not a number") })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(DataError::Row { line, message: format!("{name} must be positive, got {v}") });
            }
            Ok(v)
        };
        let d = field(0, "d_um")? / 1e6;
        let tau_measured = field(1, "tau_s")?;
        let error_bar = match (with_errors, record.get(2)) {
            (true, Some(s)) if !s.is_empty() => Some(field(2, "err_s")?),
            _ => None,
        };
        points.push(ExperimentPoint { d, tau_measured, error_bar });
    }
    points.sort_by(|a, b| a.d.total_cmp(&b.d));
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlayRow {
    pub d_um: f64,
    pub tau_measured_s: f64,
    pub err_s: Option<f64>,
    /// Model trap lifetime; `None` if the point failed.
    pub tau_model_s: Option<f64>,
    /// `tau_model / tau_measured`.
    pub ratio: Option<f64>,
}

/// Model trap lifetime at each measured distance.
pub fn overlay(ctx: &RunContext, points: &[ExperimentPoint]) -> Vec<OverlayRow> {
    points
        .par_iter()
        .map(|p| {
            let tau_model = ctx
                .point(Some((SweepVariable::Distance, p.d)))
                .ok()
                .and_then(|point| evaluate_point(ctx, &point, p.d).tau_loss);
            OverlayRow {
                d_um: p.d * 1e6,
                tau_measured_s: p.tau_measured,
                err_s: p.error_bar,
                tau_model_s: tau_model,
                ratio: tau_model.map(|m| m / p.tau_measured),
            }
        })
        .collect()
}

pub fn emit_overlay(rows: &[OverlayRow], format: Format) -> String {
    let sci = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    match format {
        Format::Csv => {
            let mut out = String::from("d_um,tau_measured_s,err_s,tau_model_s,ratio\n");
            for r in rows {
                out.push_str(&format!(
                    "{:e},{:e},{},{},{}\n",
                    r.d_um,
                    r.tau_measured_s,
                    sci(r.err_s),
                    sci(r.tau_model_s),
                    sci(r.ratio)
                ));
            }
            out
        }
        Format::Json => to_json(rows).expect("overlay rows serialize"),
    }
}
