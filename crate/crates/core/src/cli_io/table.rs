//! Plot-ready output. Every number is written with `{:e}`, the shortest
//! scientific form that parses back to the same `f64`.

use super::sweep::{ResultRow, ResultTable};
use crate::asymptotics::RegimeLabel;
use serde::{Deserialize, Serialize};
use std::io;
use thiserror::Error;

pub const COLUMNS: [&str; 8] =
    ["swept_name", "swept_value_si", "gamma_flip", "tau_flip", "tau_loss", "tau_asymptotic", "regime", "quad_error"];

/// Regime column value of a row whose evaluation failed.
pub const FAILED: &str = "failed";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("refusing to emit an empty table")]
    Empty,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown regime label '{0}'")]
    Regime(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRow {
    swept_name: String,
    swept_value_si: f64,
    gamma_flip: Option<f64>,
    tau_flip: Option<f64>,
    tau_loss: Option<f64>,
    tau_asymptotic: Option<f64>,
    regime: String,
    quad_error: Option<f64>,
}

fn regime_text(row: &ResultRow) -> &'static str {
    row.regime.map_or(FAILED, |r| r.as_str())
}

fn sci(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Compact JSON with floats in `{:e}` form.
struct Scientific;

impl serde_json::ser::Formatter for Scientific {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// `value` as compact JSON with scientific floats, newline terminated.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, serde_json::Error> {
    let mut out = Vec::new();
    value.serialize(&mut serde_json::Serializer::with_formatter(&mut out, Scientific))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("json output is utf-8"))
}

pub fn emit_table(table: &ResultTable, format: Format) -> Result<String, TableError> {
    if table.rows.is_empty() {
        return Err(TableError::Empty);
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for row in &table.rows {
                w.write_record([
                    table.swept_name.clone(),
                    format!("{:e}", row.swept_value),
                    sci(row.gamma_flip),
                    sci(row.tau_flip),
                    sci(row.tau_loss),
                    sci(row.tau_asymptotic),
                    regime_text(row).to_string(),
                    sci(row.quad_error),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::Json => {
            let rows: Vec<JsonRow> = table
                .rows
                .iter()
                .map(|row| JsonRow {
                    swept_name: table.swept_name.clone(),
                    swept_value_si: row.swept_value,
                    gamma_flip: row.gamma_flip,
                    tau_flip: row.tau_flip,
                    tau_loss: row.tau_loss,
                    tau_asymptotic: row.tau_asymptotic,
                    regime: regime_text(row).to_string(),
                    quad_error: row.quad_error,
                })
                .collect();
            Ok(to_json(&rows)?)
        }
    }
}

fn parse_regime(s: &str) -> Result<Option<RegimeLabel>, TableError> {
    if s == FAILED {
        return Ok(None);
    }
    serde_json::from_value(serde_json::Value::String(s.to_string())).map(Some).map_err(|_| TableError::Regime(s.to_string()))
}

/// Reads back [`emit_table`]'s JSON. Row issues are not part of the schema
/// and come back as `None`.
pub fn parse_table_json(text: &str) -> Result<ResultTable, TableError> {
    let rows: Vec<JsonRow> = serde_json::from_str(text)?;
    let swept_name = rows.first().map(|r| r.swept_name.clone()).ok_or(TableError::Empty)?;
    let rows = rows
        .into_iter()
        .map(|r| {
            Ok(ResultRow {
                swept_value: r.swept_value_si,
                gamma_flip: r.gamma_flip,
                tau_flip: r.tau_flip,
                tau_loss: r.tau_loss,
                tau_asymptotic: r.tau_asymptotic,
                regime: parse_regime(&r.regime)?,
                quad_error: r.quad_error,
                issue: None,
            })
        })
        .collect::<Result<_, TableError>>()?;
    Ok(ResultTable { swept_name, rows })
}
