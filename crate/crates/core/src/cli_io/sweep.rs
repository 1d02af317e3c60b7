use super::config::{Point, RunContext};
use super::units::Dimension;
use crate::asymptotics::{asymptotic_lifetime, classify_regime, RegimeInputs, RegimeLabel};
use crate::layered_green::{im_curlcurl_free, GreenError, GreenOptions, GreenResult, LayerStack};
use crate::quantities::{thermal_occupation, Material};
use crate::spin_flip::{flip_rate, free_space_lifetime, rate_from_green, trap_loss_rate, SpinFlipError};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    Distance,
    SkinDepth,
    Thickness,
    Temperature,
    Frequency,
}

impl SweepVariable {
    pub const NAMES: [&'static str; 5] = ["distance", "skin_depth", "thickness", "temperature", "frequency"];

    /// Full names plus the config key of the same quantity.
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "distance" | "d" => SweepVariable::Distance,
            "skin_depth" | "delta" => SweepVariable::SkinDepth,
            "thickness" | "h" => SweepVariable::Thickness,
            "temperature" | "T" => SweepVariable::Temperature,
            "frequency" | "f" => SweepVariable::Frequency,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::SkinDepth => "skin_depth",
            SweepVariable::Thickness => "thickness",
            SweepVariable::Temperature => "temperature",
            SweepVariable::Frequency => "frequency",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            SweepVariable::Distance | SweepVariable::SkinDepth | SweepVariable::Thickness => Dimension::Length,
            SweepVariable::Temperature => Dimension::Temperature,
            SweepVariable::Frequency => Dimension::Frequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self, String> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(format!("need min < max, got {min} and {max}"));
        }
        if points < 2 {
            return Err(format!("points must be at least 2, got {points}"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(format!("log spacing needs min > 0, got {min}"));
        }
        Ok(Grid { min, max, points, spacing })
    }

    /// Grid values in increasing order; both ends are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == last {
                    return self.max;
                }
                let t = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    // base 10 keeps decade points exact
                    Spacing::Log => 10f64.powf(self.min.log10() + t * (self.max.log10() - self.min.log10())),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Grid,
    pub context: RunContext,
}

impl SweepSpec {
    pub fn from_context(context: &RunContext) -> Option<Self> {
        let (variable, grid) = context.sweep?;
        Some(SweepSpec { variable, grid, context: context.clone() })
    }
}

/// Why a row is incomplete or approximate. Not part of the emitted schema.
#[derive(Debug, Clone, PartialEq)]
pub enum RowIssue {
    /// Values are the best estimate from an integral that missed its tolerance.
    NotConverged(String),
    /// No values could be computed.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub swept_value: f64,
    /// Spin-flip rate [1/s].
    pub gamma_flip: Option<f64>,
    pub tau_flip: Option<f64>,
    /// Trap lifetime including the flip-to-loss factor and background.
    pub tau_loss: Option<f64>,
    /// Closed-form lifetime, absent in the crossover region.
    pub tau_asymptotic: Option<f64>,
    /// `None` when the point failed.
    pub regime: Option<RegimeLabel>,
    /// Relative error estimate of the Green tensor.
    pub quad_error: Option<f64>,
    pub issue: Option<RowIssue>,
}

impl ResultRow {
    fn failed(swept_value: f64, message: String) -> Self {
        ResultRow {
            swept_value,
            gamma_flip: None,
            tau_flip: None,
            tau_loss: None,
            tau_asymptotic: None,
            regime: None,
            quad_error: None,
            issue: Some(RowIssue::Failed(message)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub swept_name: String,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn issues(&self) -> impl Iterator<Item = (f64, &RowIssue)> {
        self.rows.iter().filter_map(|r| r.issue.as_ref().map(|i| (r.swept_value, i)))
    }
}

/// Stack for a point: thick slab when `h` is infinite, otherwise film on a
/// dielectric substrate.
pub fn point_stack(ctx: &RunContext, point: &Point) -> Result<(Material, LayerStack), String> {
    let film = point.film.material(point.frequency, point.temperature).map_err(|e| e.to_string())?;
    let stack = if point.h.is_infinite() {
        LayerStack::thick(film.clone())
    } else {
        let substrate = Material::dielectric(ctx.substrate_eps).map_err(|e| e.to_string())?;
        LayerStack::new(film.clone(), point.h, substrate).map_err(|e| e.to_string())?
    };
    Ok((film, stack))
}

/// Full-integral row for one point. Never fails; problems go into `issue`.
pub fn evaluate_point(ctx: &RunContext, point: &Point, swept_value: f64) -> ResultRow {
    match try_evaluate(ctx, point, swept_value) {
        Ok(row) => row,
        Err(message) => ResultRow::failed(swept_value, message),
    }
}

fn try_evaluate(ctx: &RunContext, point: &Point, swept_value: f64) -> Result<ResultRow, String> {
    let omega = point.omega();
    let (film, stack) = point_stack(ctx, point)?;
    let transition = ctx.transition.at(omega).map_err(|e| e.to_string())?;
    let options = GreenOptions { rel_tol: ctx.rel_tol, ..GreenOptions::default() };

    let (gamma, green, issue) = match flip_rate(&transition, point.d, &stack, point.temperature, &options) {
        Ok(rate) => (rate.gamma, rate.green, None),
        Err(SpinFlipError::Green(err @ GreenError::NotConverged { in_plane, normal, error_bound })) => {
            let n = thermal_occupation(omega, point.temperature).map_err(|e| e.to_string())?;
            let green = GreenResult {
                in_plane,
                normal,
                free: im_curlcurl_free(omega),
                abs_error_estimate: error_bound,
                evaluations: 0,
            };
            (rate_from_green(&transition, &green, n), green, Some(RowIssue::NotConverged(err.to_string())))
        }
        Err(e) => return Err(e.to_string()),
    };

    let scale = green.in_plane.abs() + green.normal.abs() + green.free;
    let (regime, tau_asymptotic) = match film.at_temperature(point.temperature).skin_depth_at(omega) {
        Some(delta) => {
            let inputs = RegimeInputs {
                d: point.d,
                delta,
                h: point.h,
                omega,
                temperature: point.temperature,
                tau0: free_space_lifetime(&transition),
            };
            let regime = classify_regime(&inputs, ctx.separation);
            (regime, asymptotic_lifetime(&inputs, regime).ok())
        }
        None => (RegimeLabel::Crossover, None),
    };

    Ok(ResultRow {
        swept_value,
        gamma_flip: Some(gamma),
        tau_flip: Some(1.0 / gamma),
        tau_loss: Some(1.0 / trap_loss_rate(gamma, &ctx.loss)),
        tau_asymptotic,
        regime: Some(regime),
        quad_error: Some(green.abs_error_estimate / scale),
        issue,
    })
}

/// One row per grid value, in grid order. Points run in parallel.
pub fn run_sweep(spec: &SweepSpec) -> ResultTable {
    let rows = spec
        .grid
        .values()
        .into_par_iter()
        .map(|v| match spec.context.point(Some((spec.variable, v))) {
            Ok(point) => evaluate_point(&spec.context, &point, v),
            Err(e) => ResultRow::failed(v, e.to_string()),
        })
        .collect();
    ResultTable { swept_name: spec.variable.name().to_string(), rows }
}

/// The unswept configuration as a one-row table keyed by distance.
pub fn run_single(ctx: &RunContext) -> ResultTable {
    let row = match ctx.point(None) {
        Ok(point) => evaluate_point(ctx, &point, point.d),
        Err(e) => ResultRow::failed(ctx.d.unwrap_or(f64::NAN), e.to_string()),
    };
    ResultTable { swept_name: SweepVariable::Distance.name().to_string(), rows: vec![row] }
}

/// Thickness series of the skin-depth figure: a thick slab and a 1 um film.
pub const FIG3_SERIES: [(&str, f64); 2] = [("thick", f64::INFINITY), ("film_1um", 1e-6)];

pub fn fig3_specs(ctx: &RunContext) -> Option<Vec<(&'static str, SweepSpec)>> {
    let base = SweepSpec::from_context(ctx)?;
    Some(
        FIG3_SERIES
            .iter()
            .map(|&(name, h)| {
                let mut spec = base.clone();
                spec.context.h = h;
                (name, spec)
            })
            .collect(),
    )
}
