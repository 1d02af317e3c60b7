//! Closed-form lifetime laws in the limits where the film thickness `h`,
//! atom-surface distance `d` and skin depth `delta` are well separated.
//!
//! All three laws share the prefactor `(8/3)^2 tau0 / (n + 1) (w/c)^3`:
//!
//! | regime                | condition        | length factor        |
//! |-----------------------|------------------|----------------------|
//! | thick, small `delta`  | `delta << d, h`  | `d^4 / (3 delta)`    |
//! | thick, large `delta`  | `delta, h >> d`  | `delta^2 d / 2`      |
//! | thin film             | `delta >> d >> h`| `delta^2 d^2 / (2h)` |

use crate::quantities::{thermal_occupation, QuantityError, SI};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error("parameters are in the crossover region; evaluate the full integral instead")]
    Crossover,
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error(transparent)]
    Quantity(#[from] QuantityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeInputs {
    pub d: f64,
    pub delta: f64,
    /// Film thickness, `f64::INFINITY` for a thick slab.
    pub h: f64,
    pub omega: f64,
    pub temperature: f64,
    /// Free-space zero-temperature lifetime [s].
    pub tau0: f64,
}

impl RegimeInputs {
    fn validate(&self) -> Result<(), AsymptoticError> {
        for (name, value) in [("d", self.d), ("delta", self.delta), ("h", self.h), ("omega", self.omega), ("tau0", self.tau0)] {
            if !(value > 0.0) {
                return Err(AsymptoticError::NonPositive { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    ThickSmallDelta,
    ThickLargeDelta,
    ThinFilm,
    Crossover,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::ThickSmallDelta => "thick_small_delta",
            RegimeLabel::ThickLargeDelta => "thick_large_delta",
            RegimeLabel::ThinFilm => "thin_film",
            RegimeLabel::Crossover => "crossover",
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_SEPARATION: f64 = 10.0;

/// Picks the regime whose every "much less than" holds by at least `ratio`.
pub fn classify_regime(r: &RegimeInputs, ratio: f64) -> RegimeLabel {
    let much_less = |small: f64, large: f64| small * ratio <= large;
    let (d, delta, h) = (r.d, r.delta, r.h);
    if much_less(delta, d) && much_less(delta, h) {
        RegimeLabel::ThickSmallDelta
    } else if much_less(d, delta) && much_less(d, h) {
        RegimeLabel::ThickLargeDelta
    } else if much_less(d, delta) && much_less(h, d) {
        RegimeLabel::ThinFilm
    } else {
        RegimeLabel::Crossover
    }
}

/// Lifetime law of `regime`.
pub fn asymptotic_lifetime(r: &RegimeInputs, regime: RegimeLabel) -> Result<f64, AsymptoticError> {
    r.validate()?;
    let (d, delta, h) = (r.d, r.delta, r.h);
    let length = match regime {
        RegimeLabel::ThickSmallDelta => d.powi(4) / (3.0 * delta),
        RegimeLabel::ThickLargeDelta => delta * delta * d / 2.0,
        RegimeLabel::ThinFilm => {
            if h.is_infinite() {
                return Err(AsymptoticError::NonPositive { name: "1/h", value: 0.0 });
            }
            delta * delta * d * d / (2.0 * h)
        }
        RegimeLabel::Crossover => return Err(AsymptoticError::Crossover),
    };
    let n = thermal_occupation(r.omega, r.temperature)?;
    let k0 = r.omega / SI.c;
    Ok((8.0f64 / 3.0).powi(2) * r.tau0 / (n + 1.0) * k0.powi(3) * length)
}

/// Skin depth of the lifetime minimum: `d` for a thick slab, `sqrt(h d)` for a film.
pub fn delta_min(d: f64, h: f64) -> f64 {
    if h.is_infinite() {
        d
    } else {
        (h * d).sqrt()
    }
}
