//! Magnetic (curl-curl) Green tensor above a vacuum / film / substrate stack.
//!
//! Axes are surface-adapted: two in-plane directions and the surface normal.
//! At coincident points the scattered tensor is diagonal, with both in-plane
//! entries given by the same Sommerfeld integral:
//!
//! ```text
//! I_par  = Im (i/8pi) int_0^inf dq (q/kz)   exp(2i kz d) [k0^2 r_p - kz^2 r_s]
//! I_norm = Im (i/4pi) int_0^inf dq (q^3/kz) exp(2i kz d) r_s
//! ```
//!
//! The path is split at `q = k0`. Below it the `1/kz` endpoint singularity is
//! removed by substitution; above it the integral is taken over
//! `kappa = sqrt(q^2 - k0^2)`, where the integrand decays as `exp(-2 kappa d)`.

use crate::quadrature::{
    integrate_decaying_tail, integrate_finite, QuadratureError, QuadratureOutcome, QuadratureSpec, Singularity,
};
use crate::quantities::{drude_permittivity, Material, QuantityError, SI};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error("atom-surface distance must be positive and finite, got {0}")]
    Distance(f64),
    #[error("film thickness must be positive (or infinite), got {0}")]
    Thickness(f64),
    #[error("only a vacuum upper half-space is supported")]
    UnsupportedTop,
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(
        "Sommerfeld integral did not converge: in-plane {in_plane:e}, normal {normal:e} (error bound {error_bound:e})"
    )]
    NotConverged { in_plane: f64, normal: f64, error_bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    S,
    P,
}

/// Vacuum half-space above a film of thickness `h` on a semi-infinite substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub top: Material,
    pub film: Material,
    /// Film thickness [m]; `f64::INFINITY` for a thick slab.
    pub h: f64,
    pub substrate: Material,
}

impl LayerStack {
    pub fn new(film: Material, h: f64, substrate: Material) -> Result<Self, GreenError> {
        if !(h > 0.0) || h.is_nan() {
            return Err(GreenError::Thickness(h));
        }
        Ok(Self { top: Material::Vacuum, film, h, substrate })
    }

    pub fn thick(film: Material) -> Self {
        Self { top: Material::Vacuum, film, h: f64::INFINITY, substrate: Material::Vacuum }
    }

    pub fn vacuum() -> Self {
        Self::thick(Material::Vacuum)
    }

    pub fn is_thick(&self) -> bool {
        self.h.is_infinite()
    }

    /// Same stack with temperature-dependent materials evaluated at `kelvin`.
    pub fn at_temperature(&self, kelvin: f64) -> Self {
        Self {
            top: self.top.at_temperature(kelvin),
            film: self.film.at_temperature(kelvin),
            h: self.h,
            substrate: self.substrate.at_temperature(kelvin),
        }
    }
}

/// Square root on the branch with `Im >= 0`.
fn decaying_sqrt(w: Complex64) -> Complex64 {
    let s = ((w.norm() + w.re.abs()) * 0.5).sqrt();
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let root = if w.re >= 0.0 { Complex64::new(s, w.im / (2.0 * s)) } else { Complex64::new(w.im.abs() / (2.0 * s), s.copysign(w.im)) };
    if root.im < 0.0 {
        -root
    } else {
        root
    }
}

/// Normal wavenumber `sqrt(eps k0^2 - q^2)` with `Im >= 0`.
pub fn normal_wavenumber(q: f64, eps: Complex64, omega: f64) -> Complex64 {
    let k0 = omega / SI.c;
    decaying_sqrt(eps * k0 * k0 - q * q)
}

fn interface(kza: Complex64, kzb: Complex64, eps_a: Complex64, eps_b: Complex64, k0sq: f64, pol: Polarization) -> Complex64 {
    match pol {
        // (kza - kzb) / (kza + kzb), written without the cancellation in kza - kzb.
        Polarization::S => (eps_a - eps_b) * k0sq / ((kza + kzb) * (kza + kzb)),
        Polarization::P => (eps_b * kza - eps_a * kzb) / (eps_b * kza + eps_a * kzb),
    }
}

/// Single-interface reflection coefficient from medium `a` onto medium `b`.
pub fn fresnel_interface(q: f64, omega: f64, eps_a: Complex64, eps_b: Complex64, pol: Polarization) -> Complex64 {
    let k0 = omega / SI.c;
    let kza = normal_wavenumber(q, eps_a, omega);
    let kzb = normal_wavenumber(q, eps_b, omega);
    interface(kza, kzb, eps_a, eps_b, k0 * k0, pol)
}

/// Permittivities of a stack frozen at one frequency.
#[derive(Debug, Clone, Copy)]
struct Optics {
    k0: f64,
    eps: [Complex64; 3],
    h: f64,
}

impl Optics {
    fn new(stack: &LayerStack, omega: f64) -> Result<Self, GreenError> {
        Ok(Self {
            k0: omega / SI.c,
            eps: [
                drude_permittivity(&stack.top, omega)?,
                drude_permittivity(&stack.film, omega)?,
                drude_permittivity(&stack.substrate, omega)?,
            ],
            h: stack.h,
        })
    }

    /// Reflection coefficient seen from the top medium, parametrised by
    /// `kz0sq = k0^2 - q^2` so that every `kz_j^2 = (eps_j - 1) k0^2 + kz0sq`
    /// is formed without cancellation.
    fn reflection(&self, kz0sq: f64, pol: Polarization) -> Complex64 {
        let k0sq = self.k0 * self.k0;
        let kz = |eps: Complex64| decaying_sqrt((eps - 1.0) * k0sq + kz0sq);
        let [e0, e1, e2] = self.eps;
        let (kz0, kz1) = (kz(e0), kz(e1));
        if self.h.is_infinite() || e1 == e2 {
            return interface(kz0, kz1, e0, e1, k0sq, pol);
        }
        // Input-admittance form of (r01 + r12 E) / (1 + r01 r12 E), E = exp(2i kz1 h),
        // i.e. r = (y0 - y_in) / (y0 + y_in) with y_in = y1 (y2 - i y1 t) / (y1 - i y2 t),
        // t = tan(kz1 h). It stays well conditioned for thin, highly conducting
        // films where r01 ~ -1 and r12 ~ 1 make the direct form cancel.
        let kz2 = kz(e2);
        let q2 = k0sq - kz0sq;
        // y0 - y2 and y0 y2 - y1^2 are formed without cancellation, which
        // matters for the tiny s-wave coefficients of evanescent waves.
        let (y0, y1, y2, y0_minus_y2, cross) = match pol {
            Polarization::S => {
                let d02 = (e0 - e2) * k0sq / (kz0 + kz2);
                let cross = -kz0 * d02 - (e1 - e0) * k0sq;
                (kz0, kz1, kz2, d02, cross)
            }
            Polarization::P => {
                let (y0, y1, y2) = (kz0 / e0, kz1 / e1, kz2 / e2);
                let d02 = (e2 - e0) * (e0 * e2 * k0sq - q2 * (e0 + e2)) / (e0 * e2 * (e2 * kz0 + e0 * kz2));
                (y0, y1, y2, d02, y0 * y2 - y1 * y1)
            }
        };
        let em1 = expm1(2.0 * I * kz1 * self.h);
        let tan = -I * em1 / (em1 + 2.0);
        let num = y1 * y0_minus_y2 - I * tan * cross;
        let den = y1 * (y0 + y2) - I * tan * (y0 * y2 + y1 * y1);
        num / den
    }
}

/// `exp(z) - 1` without cancellation for small `|z|`.
fn expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin, z.re.exp() * z.im.sin())
}

/// Generalised reflection coefficient of the three-layer stack.
pub fn fresnel_stack(q: f64, omega: f64, stack: &LayerStack, pol: Polarization) -> Result<Complex64, GreenError> {
    let optics = Optics::new(stack, omega)?;
    let k0 = optics.k0;
    Ok(optics.reflection((k0 - q) * (k0 + q), pol))
}

/// Free-space diagonal element of `Im[curl curl G]`, `k0^3 / 6 pi`.
pub fn im_curlcurl_free(omega: f64) -> f64 {
    let k0 = omega / SI.c;
    k0 * k0 * k0 / (6.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    /// Relative tolerance per tensor component.
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_subdivisions: 2000 }
    }
}

/// Imaginary part of the coincident-point magnetic Green tensor [1/m].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenResult {
    /// Scattered in-plane diagonal element.
    pub in_plane: f64,
    /// Scattered surface-normal diagonal element.
    pub normal: f64,
    /// Free-space diagonal element.
    pub free: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl GreenResult {
    /// Scattered diagonal in (in-plane, in-plane, normal) order.
    pub fn scattered_diagonal(&self) -> [f64; 3] {
        [self.in_plane, self.in_plane, self.normal]
    }

    /// Free plus scattered diagonal in (in-plane, in-plane, normal) order.
    pub fn total_diagonal(&self) -> [f64; 3] {
        self.scattered_diagonal().map(|s| s + self.free)
    }
}

#[derive(Debug, Clone, Copy)]
enum Component {
    InPlane,
    Normal,
}

fn segments(optics: &Optics, d: f64) -> (Vec<f64>, f64) {
    let tail_start = 2.0 / d;
    let k0 = optics.k0;
    let mut scales = Vec::new();
    let film_scale = (optics.eps[1] - 1.0).norm().sqrt() * k0;
    scales.push(film_scale);
    if optics.h.is_finite() {
        scales.push((optics.eps[2] - 1.0).norm().sqrt() * k0);
        scales.push(1.0 / optics.h);
    }
    scales.retain(|&s| s > 0.0 && s < tail_start);
    scales.sort_by(f64::total_cmp);
    let mut points = vec![0.0];
    if let Some(&first) = scales.first() {
        // decade grid from the smallest material scale up to the tail
        let mut p = first;
        while p < tail_start {
            points.push(p);
            p *= 10.0;
        }
        points.extend(scales.iter().skip(1));
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    }
    (points, tail_start)
}

fn integrate_component(
    optics: &Optics,
    d: f64,
    which: Component,
    spec: &QuadratureSpec,
) -> Result<QuadratureOutcome<f64>, GreenError> {
    let k0 = optics.k0;
    let k0sq = k0 * k0;

    // q in [0, k0]: kz real.
    let propagating = |q: f64| -> f64 {
        let kz0sq = (k0 - q) * (k0 + q);
        let kz = kz0sq.sqrt();
        if kz == 0.0 {
            // q rounded onto k0; the substituted integrand is bounded there
            return 0.0;
        }
        let phase = Complex64::new(0.0, 2.0 * kz * d).exp();
        let rs = optics.reflection(kz0sq, Polarization::S);
        let value = match which {
            Component::InPlane => {
                let rp = optics.reflection(kz0sq, Polarization::P);
                I / (8.0 * PI) * (q / kz) * phase * (k0sq * rp - kz0sq * rs)
            }
            Component::Normal => I / (4.0 * PI) * (q * q * q / kz) * phase * rs,
        };
        value.im
    };

    // q > k0: kz = i kappa, q dq / kz = -i dkappa.
    let evanescent = |kappa: f64| -> f64 {
        let kz0sq = -kappa * kappa;
        let decay = (-2.0 * kappa * d).exp();
        if decay == 0.0 {
            return 0.0;
        }
        let rs = optics.reflection(kz0sq, Polarization::S);
        match which {
            Component::InPlane => {
                let rp = optics.reflection(kz0sq, Polarization::P);
                decay * (k0sq * rp + kappa * kappa * rs).im / (8.0 * PI)
            }
            Component::Normal => decay * (kappa * kappa + k0sq) * rs.im / (4.0 * PI),
        }
    };

    let mut total = QuadratureOutcome { value: 0.0, error_estimate: 0.0, evaluations: 0, converged: true };
    let mut add = |o: QuadratureOutcome<f64>| {
        total.value += o.value;
        total.error_estimate += o.error_estimate;
        total.evaluations += o.evaluations;
        total.converged &= o.converged;
    };

    add(integrate_finite(propagating, 0.0, k0, &spec.with_singularity(Singularity::InverseSqrtAtUpper))?);
    let (points, tail_start) = segments(optics, d);
    let mut bounds = points.clone();
    bounds.push(tail_start);
    for w in bounds.windows(2) {
        add(integrate_finite(evanescent, w[0], w[1], spec)?);
    }
    add(integrate_decaying_tail(evanescent, tail_start, 0.5 / d, spec)?);
    Ok(total)
}

/// Scattered part of `Im[curl curl G](r_A, r_A)` at height `d` above `stack`.
pub fn im_curlcurl_scattered(d: f64, omega: f64, stack: &LayerStack, options: &GreenOptions) -> Result<GreenResult, GreenError> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(GreenError::Distance(d));
    }
    if !(stack.h > 0.0) || stack.h.is_nan() {
        return Err(GreenError::Thickness(stack.h));
    }
    if stack.top != Material::Vacuum {
        return Err(GreenError::UnsupportedTop);
    }
    let optics = Optics::new(stack, omega)?;
    let free = im_curlcurl_free(omega);

    let mut evaluations = 0;
    let mut run = |which: Component| -> Result<QuadratureOutcome<f64>, GreenError> {
        // A coarse pass fixes the absolute scale so near-empty segments
        // cannot stall on a purely relative target.
        let coarse = QuadratureSpec { rel_tol: 1e-4, max_subdivisions: options.max_subdivisions, ..Default::default() };
        let rough = integrate_component(&optics, d, which, &coarse)?;
        let spec = QuadratureSpec {
            rel_tol: options.rel_tol,
            abs_tol: (options.rel_tol * rough.value.abs() * 0.05).max(1e-300),
            max_subdivisions: options.max_subdivisions,
            singularity: Singularity::None,
        };
        let fine = integrate_component(&optics, d, which, &spec)?;
        evaluations += rough.evaluations + fine.evaluations;
        Ok(fine)
    };
    let par = run(Component::InPlane)?;
    let norm = run(Component::Normal)?;
    let error = par.error_estimate + norm.error_estimate;
    if !(par.converged && norm.converged) {
        return Err(GreenError::NotConverged { in_plane: par.value, normal: norm.value, error_bound: error });
    }
    Ok(GreenResult { in_plane: par.value, normal: norm.value, free, abs_error_estimate: error, evaluations })
}
