//! Unit suffixes accepted in configuration values. A bare number is SI.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    /// Ordinary frequency, in Hz.
    Frequency,
    Temperature,
    Time,
    Rate,
    Conductivity,
    Dimensionless,
}

/// Conversion to SI. Submultiples divide by an exact power of ten so that
/// `50 um` is the same `f64` as `50e-6`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Times(f64),
    Over(f64),
}

use Scale::{Over, Times};

impl Dimension {
    fn units(self) -> &'static [(&'static str, Scale)] {
        match self {
            Dimension::Length => &[
                ("nm", Over(1e9)),
                ("um", Over(1e6)),
                ("µm", Over(1e6)),
                ("μm", Over(1e6)),
                ("mm", Over(1e3)),
                ("cm", Over(1e2)),
                ("m", Times(1.0)),
            ],
            Dimension::Frequency => &[("Hz", Times(1.0)), ("kHz", Times(1e3)), ("MHz", Times(1e6)), ("GHz", Times(1e9))],
            Dimension::Temperature => &[("mK", Over(1e3)), ("K", Times(1.0))],
            Dimension::Time => &[("us", Over(1e6)), ("µs", Over(1e6)), ("ms", Over(1e3)), ("s", Times(1.0)), ("min", Times(60.0))],
            Dimension::Rate => &[("/s", Times(1.0)), ("1/s", Times(1.0)), ("s^-1", Times(1.0)), ("Hz", Times(1.0)), ("/ms", Times(1e3))],
            Dimension::Conductivity => &[("S/m", Times(1.0)), ("MS/m", Times(1e6))],
            Dimension::Dimensionless => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Frequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::Time => "time",
            Dimension::Rate => "rate",
            Dimension::Conductivity => "conductivity",
            Dimension::Dimensionless => "dimensionless",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("'{0}' does not start with a number")]
    NotANumber(String),
    #[error("unknown {dimension} unit '{unit}' (accepted: {accepted})")]
    UnknownUnit { unit: String, dimension: &'static str, accepted: String },
}

fn scale(unit: &str, dim: Dimension) -> Result<Scale, UnitError> {
    if unit.is_empty() {
        return Ok(Times(1.0));
    }
    dim.units().iter().find(|(u, _)| *u == unit).map(|(_, s)| *s).ok_or_else(|| UnitError::UnknownUnit {
        unit: unit.to_string(),
        dimension: dim.name(),
        accepted: dim.units().iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", "),
    })
}

/// Names of the units accepted for `dim`.
pub fn unit_names(dim: Dimension) -> Vec<&'static str> {
    dim.units().iter().map(|(u, _)| *u).collect()
}

pub fn to_si(value: f64, unit: &str, dim: Dimension) -> Result<f64, UnitError> {
    Ok(match scale(unit, dim)? {
        Times(f) => value * f,
        Over(f) => value / f,
    })
}

pub fn from_si(value: f64, unit: &str, dim: Dimension) -> Result<f64, UnitError> {
    Ok(match scale(unit, dim)? {
        Times(f) => value / f,
        Over(f) => value * f,
    })
}

/// Length of the leading floating-point literal in `s`.
fn number_prefix(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let mut any = digits(&mut i);
    if i < b.len() && b[i] == b'.' {
        i += 1;
        any |= digits(&mut i);
    }
    if !any {
        return 0;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if digits(&mut j) {
            i = j;
        }
    }
    i
}

/// `"50 um"`, `"50um"`, `"5.6e5 Hz"` or `"2"` to SI.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let text = text.trim();
    let split = number_prefix(text);
    if split == 0 {
        return Err(UnitError::NotANumber(text.to_string()));
    }
    let value: f64 = text[..split].parse().map_err(|_| UnitError::NotANumber(text.to_string()))?;
    to_si(value, text[split..].trim(), dim)
}
