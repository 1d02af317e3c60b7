//! Spin-flip rates from the magnetic Green tensor.
//!
//! The bias field (quantization axis) lies in the surface plane, so a
//! `Delta mF = +-1` transition couples through the spin components along the
//! other in-plane axis and along the surface normal. Cross terms vanish by
//! planar symmetry.

use crate::layered_green::{im_curlcurl_free, im_curlcurl_scattered, GreenError, GreenOptions, GreenResult, LayerStack};
use crate::quantities::{positive, thermal_occupation, QuantityError, SI};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinFlipError {
    #[error("transition mF {from} -> {to} is not a spin flip (|Delta mF| must be 1)")]
    Forbidden { from: f64, to: f64 },
    #[error("{name} = {value} is not a valid half-integer quantum number")]
    NotHalfInteger { name: &'static str, value: f64 },
    #[error("F = {f} is not I +- 1/2 for nuclear spin I = {i}")]
    Manifold { f: f64, i: f64 },
    #[error("|mF| = {m} exceeds F = {f}")]
    Projection { m: f64, f: f64 },
    #[error("transition has vanishing spin matrix elements")]
    Dark,
    #[error("flip-to-loss factor must be positive, got {0}")]
    LossFactor(f64),
    #[error("background rate must be non-negative, got {0}")]
    BackgroundRate(f64),
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error(transparent)]
    Green(#[from] GreenError),
}

/// Twice a half-integer quantum number.
fn doubled(name: &'static str, value: f64) -> Result<i64, SpinFlipError> {
    let twice = (2.0 * value).round();
    if !value.is_finite() || (2.0 * value - twice).abs() > 1e-9 {
        return Err(SpinFlipError::NotHalfInteger { name, value });
    }
    Ok(twice as i64)
}

/// Electron-spin matrix elements `<f|S_j|i>` along the in-plane axis
/// perpendicular to the bias field and along the surface normal.
///
/// Inside a hyperfine manifold `S` acts as `g F` with
/// `g = [F(F+1) + S(S+1) - I(I+1)] / (2 F(F+1))`, and the transverse
/// components follow from the ladder operators.
pub fn spin_matrix_elements(f: f64, mf_initial: f64, mf_final: f64, nuclear_spin: f64) -> Result<(Complex64, Complex64), SpinFlipError> {
    let f2 = doubled("F", f)?;
    let mi2 = doubled("mF_initial", mf_initial)?;
    let mf2 = doubled("mF_final", mf_final)?;
    let i2 = doubled("I", nuclear_spin)?;
    if i2 < 0 || f2 <= 0 || (f2 - i2).abs() != 1 {
        return Err(SpinFlipError::Manifold { f, i: nuclear_spin });
    }
    for (m2, m) in [(mi2, mf_initial), (mf2, mf_final)] {
        if m2.abs() > f2 || (f2 - m2) % 2 != 0 {
            return Err(SpinFlipError::Projection { m, f });
        }
    }
    if (mi2 - mf2).abs() != 2 {
        return Err(SpinFlipError::Forbidden { from: mf_initial, to: mf_final });
    }
    let ff = f * (f + 1.0);
    let g = (ff + 0.75 - nuclear_spin * (nuclear_spin + 1.0)) / (2.0 * ff);
    let (m, lowering) = (mf_initial, mf2 < mi2);
    let ladder = if lowering { (ff - m * (m - 1.0)).sqrt() } else { (ff - m * (m + 1.0)).sqrt() };
    // S_x = (S+ + S-)/2, S_y = (S+ - S-)/(2i)
    let inplane = Complex64::new(0.5 * g * ladder, 0.0);
    let normal = if lowering { Complex64::new(0.0, 0.5 * g * ladder) } else { Complex64::new(0.0, -0.5 * g * ladder) };
    Ok((inplane, normal))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinTransition {
    /// Transition angular frequency [rad/s].
    pub omega: f64,
    pub s_inplane: Complex64,
    pub s_normal: Complex64,
    pub label: String,
}

impl SpinTransition {
    pub fn new(omega: f64, s_inplane: Complex64, s_normal: Complex64, label: impl Into<String>) -> Result<Self, SpinFlipError> {
        positive("transition angular frequency", omega)?;
        if s_inplane.norm_sqr() + s_normal.norm_sqr() == 0.0 {
            return Err(SpinFlipError::Dark);
        }
        Ok(Self { omega, s_inplane, s_normal, label: label.into() })
    }

    pub fn hyperfine(omega: f64, f: f64, mf_initial: f64, mf_final: f64, nuclear_spin: f64) -> Result<Self, SpinFlipError> {
        let (s_inplane, s_normal) = spin_matrix_elements(f, mf_initial, mf_final, nuclear_spin)?;
        Self::new(omega, s_inplane, s_normal, format!("({f},{mf_initial})->({f},{mf_final})"))
    }

    /// 87Rb |F=2, mF=2> -> |2, 1>.
    pub fn rb87(omega: f64) -> Result<Self, SpinFlipError> {
        Self::hyperfine(omega, 2.0, 2.0, 1.0, 1.5)
    }

    /// `sum_j |<f|S_j|i>|^2`.
    pub fn strength(&self) -> f64 {
        self.s_inplane.norm_sqr() + self.s_normal.norm_sqr()
    }

    /// `mu0 2 (muB gS)^2 / hbar`.
    fn coupling(&self) -> f64 {
        let m = SI.mu_b * SI.g_s;
        SI.mu0 * 2.0 * m * m / SI.hbar
    }
}

/// `tau0 = 3 pi hbar c^3 / (mu0 w^3 sum_j |<f| gS muB S_j |i>|^2)`.
pub fn free_space_lifetime(t: &SpinTransition) -> f64 {
    let m = SI.g_s * SI.mu_b;
    3.0 * PI * SI.hbar * SI.c.powi(3) / (SI.mu0 * t.omega.powi(3) * m * m * t.strength())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipRate {
    /// Spin-flip rate [1/s].
    pub gamma: f64,
    pub thermal_occupation: f64,
    pub green: GreenResult,
}

impl FlipRate {
    pub fn lifetime(&self) -> f64 {
        1.0 / self.gamma
    }
}

/// Rate from an already evaluated Green tensor.
pub fn rate_from_green(t: &SpinTransition, green: &GreenResult, thermal_occupation: f64) -> f64 {
    let [inplane, _, normal] = green.total_diagonal();
    t.coupling() * (thermal_occupation + 1.0) * (t.s_inplane.norm_sqr() * inplane + t.s_normal.norm_sqr() * normal)
}

/// Spin-flip rate at height `d` above `stack` at temperature `temperature`.
pub fn flip_rate(t: &SpinTransition, d: f64, stack: &LayerStack, temperature: f64, options: &GreenOptions) -> Result<FlipRate, SpinFlipError> {
    let n = thermal_occupation(t.omega, temperature)?;
    let green = im_curlcurl_scattered(d, t.omega, &stack.at_temperature(temperature), options)?;
    Ok(FlipRate { gamma: rate_from_green(t, &green, n), thermal_occupation: n, green })
}

/// Rate with no surface at all.
pub fn free_space_rate(t: &SpinTransition, temperature: f64) -> Result<f64, SpinFlipError> {
    let n = thermal_occupation(t.omega, temperature)?;
    let free = im_curlcurl_free(t.omega);
    let green = GreenResult { in_plane: 0.0, normal: 0.0, free, abs_error_estimate: 0.0, evaluations: 0 };
    Ok(rate_from_green(t, &green, n))
}

/// Conversion of spin flips into trap loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel {
    /// Multiplies the spin-flip lifetime to give the loss lifetime.
    pub flip_to_loss_factor: f64,
    /// Loss rate from background-gas collisions [1/s].
    pub background_rate: f64,
}

impl Default for LossModel {
    fn default() -> Self {
        Self { flip_to_loss_factor: 5.0 / 3.0, background_rate: 0.0 }
    }
}

impl LossModel {
    pub fn new(flip_to_loss_factor: f64, background_rate: f64) -> Result<Self, SpinFlipError> {
        if !(flip_to_loss_factor > 0.0 && flip_to_loss_factor.is_finite()) {
            return Err(SpinFlipError::LossFactor(flip_to_loss_factor));
        }
        if !(background_rate >= 0.0 && background_rate.is_finite()) {
            return Err(SpinFlipError::BackgroundRate(background_rate));
        }
        Ok(Self { flip_to_loss_factor, background_rate })
    }
}

/// `gamma_flip / factor + background`.
pub fn trap_loss_rate(gamma_flip: f64, model: &LossModel) -> f64 {
    gamma_flip / model.flip_to_loss_factor + model.background_rate
}
