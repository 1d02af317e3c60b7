//! `key = value` run configuration.
//!
//! ```text
//! # copper slab, single point
//! material = Cu
//! d = 50 um
//! f = 560 kHz
//! T = 300 K
//! ```

use super::sweep::{Grid, Spacing, SweepVariable};
use super::units::{parse_quantity, Dimension, UnitError};
use crate::quantities::{material_preset, Material, QuantityError, PRESET_NAMES};
use crate::spin_flip::{LossModel, SpinFlipError, SpinTransition};
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {key}: {source}")]
    Unit {
        line: usize,
        key: String,
        #[source]
        source: UnitError,
    },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("missing required key '{key}'")]
    MissingKey { key: String },
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

const KEYS: &[&str] = &[
    "material",
    "delta",
    "delta_at",
    "sigma",
    "d",
    "h",
    "f",
    "T",
    "substrate_eps",
    "F",
    "mF_i",
    "mF_f",
    "I",
    "flip_to_loss_factor",
    "background_rate",
    "background_lifetime",
    "tol",
    "separation",
    "sweep",
    "min",
    "max",
    "points",
    "spacing",
];

const FILM_KEYS: &[&str] = &["material", "delta", "delta_at", "sigma"];
const BACKGROUND_KEYS: &[&str] = &["background_rate", "background_lifetime"];

/// Built-in parameter sets. Keys given by the user override the preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    None,
    /// Distance sweep above a thin film on silicon; needs a background rate.
    Fig2,
    /// Skin-depth sweep at 50 um; run once per thickness series.
    Fig3,
}

impl Preset {
    fn text(self) -> &'static str {
        match self {
            Preset::None => "",
            Preset::Fig2 => {
                "delta = 103 um\nh = 2 um\nsubstrate_eps = 11.7\nf = 400 kHz\nT = 400 K\nflip_to_loss_factor = 5/3\n\
                 sweep = distance\nmin = 1 um\nmax = 100 um\npoints = 41\nspacing = log\n"
            }
            Preset::Fig3 => {
                "d = 50 um\nf = 560 kHz\nT = 300 K\nh = inf\n\
                 sweep = skin_depth\nmin = 100 nm\nmax = 1000 um\npoints = 41\nspacing = log\n"
            }
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Preset::Fig2 => BACKGROUND_KEYS,
            _ => &[],
        }
    }
}

/// How the film conductivity was given.
#[derive(Debug, Clone, PartialEq)]
pub enum FilmSpec {
    Preset(String),
    /// Skin depth at `reference_frequency` (Hz); `None` means the operating frequency.
    SkinDepth { delta: f64, reference_frequency: Option<f64> },
    Conductivity(f64),
}

impl FilmSpec {
    pub fn material(&self, frequency: f64, temperature: f64) -> Result<Material, QuantityError> {
        match self {
            FilmSpec::Preset(name) => material_preset(name, temperature),
            FilmSpec::SkinDepth { delta, reference_frequency } => {
                Material::skin_depth(*delta, 2.0 * PI * reference_frequency.unwrap_or(frequency))
            }
            FilmSpec::Conductivity(sigma) => Material::conductor(*sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec {
    pub f: f64,
    pub mf_initial: f64,
    pub mf_final: f64,
    pub nuclear_spin: f64,
}

impl Default for TransitionSpec {
    /// 87Rb |2,2> -> |2,1>.
    fn default() -> Self {
        TransitionSpec { f: 2.0, mf_initial: 2.0, mf_final: 1.0, nuclear_spin: 1.5 }
    }
}

impl TransitionSpec {
    pub fn at(&self, omega: f64) -> Result<SpinTransition, SpinFlipError> {
        SpinTransition::hyperfine(omega, self.f, self.mf_initial, self.mf_final, self.nuclear_spin)
    }
}

/// Everything needed to evaluate one geometry, in SI.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub film: FilmSpec,
    pub d: f64,
    /// `f64::INFINITY` for a thick slab.
    pub h: f64,
    /// Ordinary frequency [Hz].
    pub frequency: f64,
    pub temperature: f64,
}

impl Point {
    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }
}

/// Validated configuration. Only the swept quantity may be left unset.
#[derive(Debug, Clone, PartialEq)]
pub struct RunContext {
    pub film: Option<FilmSpec>,
    pub d: Option<f64>,
    pub h: f64,
    pub frequency: Option<f64>,
    pub temperature: Option<f64>,
    pub substrate_eps: f64,
    pub transition: TransitionSpec,
    pub loss: LossModel,
    pub rel_tol: f64,
    /// Scale separation required before an asymptotic law is quoted.
    pub separation: f64,
    pub sweep: Option<(SweepVariable, Grid)>,
}

impl RunContext {
    /// Fixed parameters with `swept` substituted.
    pub fn point(&self, swept: Option<(SweepVariable, f64)>) -> Result<Point, ConfigError> {
        let missing = |key: &str| ConfigError::MissingKey { key: key.to_string() };
        let mut film = self.film.clone();
        let mut d = self.d;
        let mut h = self.h;
        let mut frequency = self.frequency;
        let mut temperature = self.temperature;
        if let Some((var, value)) = swept {
            match var {
                SweepVariable::Distance => d = Some(value),
                SweepVariable::SkinDepth => film = Some(FilmSpec::SkinDepth { delta: value, reference_frequency: None }),
                SweepVariable::Thickness => h = value,
                SweepVariable::Temperature => temperature = Some(value),
                SweepVariable::Frequency => frequency = Some(value),
            }
        }
        Ok(Point {
            film: film.ok_or_else(|| missing("material"))?,
            d: d.ok_or_else(|| missing("d"))?,
            h,
            frequency: frequency.ok_or_else(|| missing("f"))?,
            temperature: temperature.ok_or_else(|| missing("T"))?,
        })
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

fn tokenize(text: &str, check_keys: bool) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse { line, message: format!("expected 'key = value', got '{content}'") });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Parse { line, message: format!("empty key or value in '{content}'") });
        }
        if check_keys && !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(ConfigError::Parse { line, message: format!("'{key}' already set on line {}", prev.line) });
        }
        out.push(Entry { key: key.to_string(), value: value.to_string(), line });
    }
    Ok(out)
}

struct Resolver {
    entries: HashMap<String, Entry>,
}

impl Resolver {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn quantity(&self, key: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.raw(key) else { return Ok(None) };
        parse_quantity(&e.value, dim)
            .map(Some)
            .map_err(|source| ConfigError::Unit { line: e.line, key: key.to_string(), source })
    }

    fn positive(&self, key: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        let v = self.quantity(key, dim)?;
        match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(invalid(key, format!("must be positive, got {x}"))),
            _ => Ok(v),
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

/// `"5/3"`, `"1.6667"`.
fn ratio(e: &Entry) -> Result<f64, ConfigError> {
    let unit_err = |source| ConfigError::Unit { line: e.line, key: e.key.clone(), source };
    match e.value.split_once('/') {
        Some((n, d)) => {
            let n = parse_quantity(n, Dimension::Dimensionless).map_err(unit_err)?;
            let d = parse_quantity(d, Dimension::Dimensionless).map_err(unit_err)?;
            Ok(n / d)
        }
        None => parse_quantity(&e.value, Dimension::Dimensionless).map_err(unit_err),
    }
}

pub fn parse_config(text: &str) -> Result<RunContext, ConfigError> {
    parse_config_with_preset(text, Preset::None)
}

/// Parses `text` on top of `preset`. Film keys and background keys replace
/// the preset's as a group.
pub fn parse_config_with_preset(text: &str, preset: Preset) -> Result<RunContext, ConfigError> {
    let user = tokenize(text, true)?;
    let base = tokenize(preset.text(), true).expect("preset text is valid");
    let given = |keys: &[&str]| user.iter().any(|e| keys.contains(&e.key.as_str()));
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for e in base {
        let k = e.key.as_str();
        if (FILM_KEYS.contains(&k) && given(FILM_KEYS)) || (BACKGROUND_KEYS.contains(&k) && given(BACKGROUND_KEYS)) {
            continue;
        }
        entries.insert(e.key.clone(), e);
    }
    for e in user {
        entries.insert(e.key.clone(), e);
    }
    let required = preset.required();
    if !required.is_empty() && !required.iter().any(|k| entries.contains_key(*k)) {
        return Err(ConfigError::MissingKey { key: required.join(" or ") });
    }
    resolve(Resolver { entries })
}

fn resolve(r: Resolver) -> Result<RunContext, ConfigError> {
    let sweep = resolve_sweep(&r)?;
    let swept = sweep.map(|(v, _)| v);

    let film = resolve_film(&r)?;
    let d = r.positive("d", Dimension::Length)?;
    let frequency = r.positive("f", Dimension::Frequency)?;
    let temperature = r.quantity("T", Dimension::Temperature)?;
    if let Some(t) = temperature {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("T", format!("must be non-negative, got {t}")));
        }
    }
    let h = match r.raw("h") {
        None => f64::INFINITY,
        Some(e) if matches!(e.value.as_str(), "inf" | "infinite" | "thick") => f64::INFINITY,
        Some(_) => r.positive("h", Dimension::Length)?.unwrap(),
    };

    for (key, present, var) in [
        ("d", d.is_some(), SweepVariable::Distance),
        ("f", frequency.is_some(), SweepVariable::Frequency),
        ("T", temperature.is_some(), SweepVariable::Temperature),
        ("material", film.is_some(), SweepVariable::SkinDepth),
    ] {
        if !present && swept != Some(var) {
            return Err(ConfigError::MissingKey { key: key.to_string() });
        }
    }
    if let Some(FilmSpec::SkinDepth { reference_frequency: None, .. }) = film {
        if swept == Some(SweepVariable::Frequency) {
            return Err(ConfigError::MissingKey { key: "delta_at".to_string() });
        }
    }

    let substrate_eps = r.quantity("substrate_eps", Dimension::Dimensionless)?.unwrap_or(11.7);
    if !(substrate_eps >= 1.0) {
        return Err(invalid("substrate_eps", format!("must be >= 1, got {substrate_eps}")));
    }

    let mut transition = TransitionSpec::default();
    for (key, slot) in [
        ("F", &mut transition.f),
        ("mF_i", &mut transition.mf_initial),
        ("mF_f", &mut transition.mf_final),
        ("I", &mut transition.nuclear_spin),
    ] {
        if let Some(v) = r.quantity(key, Dimension::Dimensionless)? {
            *slot = v;
        }
    }
    transition.at(1.0).map_err(|e| invalid("F", e.to_string()))?;

    let defaults = LossModel::default();
    let factor = match r.raw("flip_to_loss_factor") {
        Some(e) => ratio(e)?,
        None => defaults.flip_to_loss_factor,
    };
    let background = match (r.quantity("background_rate", Dimension::Rate)?, r.positive("background_lifetime", Dimension::Time)?) {
        (Some(_), Some(_)) => {
            return Err(invalid("background_rate", "give either background_rate or background_lifetime, not both"));
        }
        (Some(rate), None) => rate,
        (None, Some(tau)) => 1.0 / tau,
        (None, None) => defaults.background_rate,
    };
    let loss = LossModel::new(factor, background).map_err(|e| match e {
        SpinFlipError::LossFactor(_) => invalid("flip_to_loss_factor", e.to_string()),
        _ => invalid("background_rate", e.to_string()),
    })?;

    let rel_tol = r.positive("tol", Dimension::Dimensionless)?.unwrap_or(1e-8);
    if rel_tol >= 1.0 {
        return Err(invalid("tol", format!("must be below 1, got {rel_tol}")));
    }
    let separation = r.positive("separation", Dimension::Dimensionless)?.unwrap_or(crate::asymptotics::DEFAULT_SEPARATION);
    if separation < 1.0 {
        return Err(invalid("separation", format!("must be >= 1, got {separation}")));
    }

    Ok(RunContext { film, d, h, frequency, temperature, substrate_eps, transition, loss, rel_tol, separation, sweep })
}

fn resolve_film(r: &Resolver) -> Result<Option<FilmSpec>, ConfigError> {
    let given: Vec<&str> = ["material", "delta", "sigma"].into_iter().filter(|k| r.has(k)).collect();
    let named = r.raw("material").map(|e| e.value.as_str()).filter(|m| *m != "custom");
    if given.len() > 1 && !(given.len() == 2 && r.raw("material").map(|e| e.value.as_str()) == Some("custom")) {
        return Err(invalid("material", format!("conflicting film definitions: {}", given.join(", "))));
    }
    if r.has("delta_at") && !r.has("delta") {
        return Err(invalid("delta_at", "only meaningful together with delta"));
    }
    if let Some(delta) = r.positive("delta", Dimension::Length)? {
        let reference_frequency = r.positive("delta_at", Dimension::Frequency)?;
        return Ok(Some(FilmSpec::SkinDepth { delta, reference_frequency }));
    }
    if let Some(sigma) = r.positive("sigma", Dimension::Conductivity)? {
        return Ok(Some(FilmSpec::Conductivity(sigma)));
    }
    match named {
        Some(name) if PRESET_NAMES.contains(&name) => Ok(Some(FilmSpec::Preset(name.to_string()))),
        Some(name) => Err(invalid(
            "material",
            format!("unknown preset '{name}' (valid: {})", PRESET_NAMES.join(", ")),
        )),
        None if r.has("material") => Err(invalid("material", "'custom' needs delta or sigma")),
        None => Ok(None),
    }
}

fn resolve_sweep(r: &Resolver) -> Result<Option<(SweepVariable, Grid)>, ConfigError> {
    let Some(e) = r.raw("sweep") else {
        for key in ["min", "max", "points", "spacing"] {
            if r.has(key) {
                return Err(ConfigError::MissingKey { key: "sweep".to_string() });
            }
        }
        return Ok(None);
    };
    let var = SweepVariable::parse(&e.value)
        .ok_or_else(|| invalid("sweep", format!("unknown variable '{}' (valid: {})", e.value, SweepVariable::NAMES.join(", "))))?;
    let need = |key: &str| ConfigError::MissingKey { key: key.to_string() };
    let min = r.quantity("min", var.dimension())?.ok_or_else(|| need("min"))?;
    let max = r.quantity("max", var.dimension())?.ok_or_else(|| need("max"))?;
    let points = match r.raw("points") {
        Some(p) => p.value.parse::<usize>().map_err(|_| invalid("points", format!("'{}' is not a count", p.value)))?,
        None => return Err(need("points")),
    };
    let spacing = match r.raw("spacing").map(|s| s.value.as_str()) {
        None | Some("log") => Spacing::Log,
        Some("linear") => Spacing::Linear,
        Some(other) => return Err(invalid("spacing", format!("expected linear or log, got '{other}'"))),
    };
    let grid = Grid::new(min, max, points, spacing).map_err(|m| invalid("sweep", m))?;
    Ok(Some((var, grid)))
}
