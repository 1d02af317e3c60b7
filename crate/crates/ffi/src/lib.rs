//! C interface to the spinflip calculator.
//!
//! Every function returns an [`SfStatus`] and writes results through out
//! pointers. On failure the reason is available from [`sf_last_error`] until
//! the next failing call on the same thread. Handles come from the
//! `sf_stack_*` and `sf_transition_*` constructors and are released with the
//! matching `*_free`.
//!
//! A `rel_tol` of zero or less selects the library default.

use spinflip::asymptotics::{asymptotic_lifetime, classify_regime, RegimeInputs, RegimeLabel};
use spinflip::layered_green::{im_curlcurl_free, im_curlcurl_scattered, GreenError, GreenOptions, GreenResult, LayerStack};
use spinflip::quantities::{skin_depth_from_conductivity, thermal_occupation, Material};
use spinflip::spin_flip::{flip_rate, free_space_lifetime, rate_from_green, SpinFlipError, SpinTransition};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Results were written but the quadrature missed its tolerance.
    NotConverged = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfRegime {
    ThickSmallDelta = 0,
    ThickLargeDelta = 1,
    ThinFilm = 2,
    Crossover = 3,
}

impl From<RegimeLabel> for SfRegime {
    fn from(r: RegimeLabel) -> Self {
        match r {
            RegimeLabel::ThickSmallDelta => SfRegime::ThickSmallDelta,
            RegimeLabel::ThickLargeDelta => SfRegime::ThickLargeDelta,
            RegimeLabel::ThinFilm => SfRegime::ThinFilm,
            RegimeLabel::Crossover => SfRegime::Crossover,
        }
    }
}

/// Imaginary part of the curl-curl Green tensor at the atom [1/m^3].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfGreen {
    pub in_plane: f64,
    pub normal: f64,
    pub free: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl From<&GreenResult> for SfGreen {
    fn from(g: &GreenResult) -> Self {
        SfGreen {
            in_plane: g.in_plane,
            normal: g.normal,
            free: g.free,
            abs_error_estimate: g.abs_error_estimate,
            evaluations: g.evaluations,
        }
    }
}

/// Opaque vacuum / film / substrate stack.
pub struct SfStack(LayerStack);

/// Opaque spin transition.
pub struct SfTransition(SpinTransition);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message of the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

type Failure = (SfStatus, String);

fn invalid(e: impl ToString) -> Failure {
    (SfStatus::InvalidArgument, e.to_string())
}

fn guard<F: FnOnce() -> Result<SfStatus, Failure>>(f: F) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside spinflip");
            SfStatus::Panic
        }
    }
}

fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| (SfStatus::NullPointer, format!("{name} is null")))
}

fn in_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| (SfStatus::NullPointer, format!("{name} is null")))
}

fn options(rel_tol: f64) -> GreenOptions {
    let mut o = GreenOptions::default();
    if rel_tol > 0.0 {
        o.rel_tol = rel_tol;
    }
    o
}

fn film_material(delta: f64, omega_ref: f64, sigma: f64) -> Result<Material, Failure> {
    if sigma > 0.0 {
        Material::conductor(sigma).map_err(invalid)
    } else {
        Material::skin_depth(delta, omega_ref).map_err(invalid)
    }
}

fn emit_stack(stack: LayerStack, out: *mut *mut SfStack) -> Result<SfStatus, Failure> {
    let out = out_ptr(out, "out")?;
    *out = Box::into_raw(Box::new(SfStack(stack)));
    Ok(SfStatus::Ok)
}

/// Thick slab with skin depth `delta` [m] at angular frequency `omega_ref`.
#[no_mangle]
pub extern "C" fn sf_stack_thick(delta: f64, omega_ref: f64, out: *mut *mut SfStack) -> SfStatus {
    guard(|| emit_stack(LayerStack::thick(film_material(delta, omega_ref, 0.0)?), out))
}

/// Thick slab of conductivity `sigma` [S/m].
#[no_mangle]
pub extern "C" fn sf_stack_thick_conductor(sigma: f64, out: *mut *mut SfStack) -> SfStatus {
    guard(|| {
        if !(sigma > 0.0) {
            return Err(invalid(format!("conductivity must be positive, got {sigma}")));
        }
        emit_stack(LayerStack::thick(film_material(0.0, 0.0, sigma)?), out)
    })
}

/// Film of thickness `h` [m] and skin depth `delta` at `omega_ref` on a
/// dielectric substrate.
#[no_mangle]
pub extern "C" fn sf_stack_film(
    delta: f64,
    omega_ref: f64,
    h: f64,
    substrate_eps: f64,
    out: *mut *mut SfStack,
) -> SfStatus {
    guard(|| {
        let film = film_material(delta, omega_ref, 0.0)?;
        let substrate = Material::dielectric(substrate_eps).map_err(invalid)?;
        emit_stack(LayerStack::new(film, h, substrate).map_err(invalid)?, out)
    })
}

#[no_mangle]
pub extern "C" fn sf_stack_vacuum(out: *mut *mut SfStack) -> SfStatus {
    guard(|| emit_stack(LayerStack::vacuum(), out))
}

/// Releases a stack; null is ignored.
///
/// # Safety
/// `stack` must come from an `sf_stack_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_stack_free(stack: *mut SfStack) {
    if !stack.is_null() {
        drop(Box::from_raw(stack));
    }
}

/// 87Rb |F=2, mF=2> -> |2, 1> at Larmor angular frequency `omega`.
#[no_mangle]
pub extern "C" fn sf_transition_rb87(omega: f64, out: *mut *mut SfTransition) -> SfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(SfTransition(SpinTransition::rb87(omega).map_err(invalid)?)));
        Ok(SfStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn sf_transition_hyperfine(
    omega: f64,
    f: f64,
    mf_initial: f64,
    mf_final: f64,
    nuclear_spin: f64,
    out: *mut *mut SfTransition,
) -> SfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = SpinTransition::hyperfine(omega, f, mf_initial, mf_final, nuclear_spin).map_err(invalid)?;
        *out = Box::into_raw(Box::new(SfTransition(t)));
        Ok(SfStatus::Ok)
    })
}

/// Releases a transition; null is ignored.
///
/// # Safety
/// `t` must come from an `sf_transition_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_transition_free(t: *mut SfTransition) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Zero-temperature free-space lifetime [s].
#[no_mangle]
pub extern "C" fn sf_free_space_lifetime(t: *const SfTransition, out_tau: *mut f64) -> SfStatus {
    guard(|| {
        let t = in_ref(t, "transition")?;
        *out_ptr(out_tau, "out_tau")? = free_space_lifetime(&t.0);
        Ok(SfStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn sf_thermal_occupation(omega: f64, temperature: f64, out: *mut f64) -> SfStatus {
    guard(|| {
        *out_ptr(out, "out")? = thermal_occupation(omega, temperature).map_err(invalid)?;
        Ok(SfStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn sf_skin_depth(sigma: f64, omega: f64, out: *mut f64) -> SfStatus {
    guard(|| {
        *out_ptr(out, "out")? = skin_depth_from_conductivity(sigma, omega).map_err(invalid)?;
        Ok(SfStatus::Ok)
    })
}

/// Scattered and free curl-curl components at distance `d` above `stack`.
/// On `NotConverged` `out` holds the best estimate.
#[no_mangle]
pub extern "C" fn sf_green(d: f64, omega: f64, stack: *const SfStack, rel_tol: f64, out: *mut SfGreen) -> SfStatus {
    guard(|| {
        let stack = in_ref(stack, "stack")?;
        let out = out_ptr(out, "out")?;
        match im_curlcurl_scattered(d, omega, &stack.0, &options(rel_tol)) {
            Ok(g) => {
                *out = SfGreen::from(&g);
                Ok(SfStatus::Ok)
            }
            Err(e @ GreenError::NotConverged { in_plane, normal, error_bound }) => {
                *out = SfGreen {
                    in_plane,
                    normal,
                    free: im_curlcurl_free(omega),
                    abs_error_estimate: error_bound,
                    evaluations: 0,
                };
                set_error(&e.to_string());
                Ok(SfStatus::NotConverged)
            }
            Err(e) => Err(invalid(e)),
        }
    })
}

/// Spin-flip rate [1/s]. `out_green` may be null. On `NotConverged` the
/// outputs hold the best estimate.
#[no_mangle]
pub extern "C" fn sf_flip_rate(
    t: *const SfTransition,
    d: f64,
    stack: *const SfStack,
    temperature: f64,
    rel_tol: f64,
    out_gamma: *mut f64,
    out_green: *mut SfGreen,
) -> SfStatus {
    guard(|| {
        let t = in_ref(t, "transition")?;
        let stack = in_ref(stack, "stack")?;
        let gamma = out_ptr(out_gamma, "out_gamma")?;
        match flip_rate(&t.0, d, &stack.0, temperature, &options(rel_tol)) {
            Ok(rate) => {
                *gamma = rate.gamma;
                // SAFETY: null or writable, as documented.
                if let Some(g) = unsafe { out_green.as_mut() } {
                    *g = SfGreen::from(&rate.green);
                }
                Ok(SfStatus::Ok)
            }
            Err(SpinFlipError::Green(e @ GreenError::NotConverged { in_plane, normal, error_bound })) => {
                let green = GreenResult {
                    in_plane,
                    normal,
                    free: im_curlcurl_free(t.0.omega),
                    abs_error_estimate: error_bound,
                    evaluations: 0,
                };
                let n = thermal_occupation(t.0.omega, temperature).map_err(invalid)?;
                *gamma = rate_from_green(&t.0, &green, n);
                // SAFETY: null or writable, as documented.
                if let Some(g) = unsafe { out_green.as_mut() } {
                    *g = SfGreen::from(&green);
                }
                set_error(&e.to_string());
                Ok(SfStatus::NotConverged)
            }
            Err(e) => Err(invalid(e)),
        }
    })
}

/// Closed-form lifetime. `h` may be `INFINITY`. The regime is classified with
/// scale separation `separation` (10 if not positive); in the crossover
/// region `out_tau` is NaN.
#[no_mangle]
pub extern "C" fn sf_asymptotic_lifetime(
    d: f64,
    delta: f64,
    h: f64,
    omega: f64,
    temperature: f64,
    tau0: f64,
    separation: f64,
    out_tau: *mut f64,
    out_regime: *mut SfRegime,
) -> SfStatus {
    guard(|| {
        let tau = out_ptr(out_tau, "out_tau")?;
        let regime_out = out_ptr(out_regime, "out_regime")?;
        let inputs = RegimeInputs { d, delta, h, omega, temperature, tau0 };
        let ratio = if separation > 0.0 { separation } else { spinflip::asymptotics::DEFAULT_SEPARATION };
        let regime = classify_regime(&inputs, ratio);
        *regime_out = regime.into();
        *tau = match regime {
            RegimeLabel::Crossover => f64::NAN,
            r => asymptotic_lifetime(&inputs, r).map_err(invalid)?,
        };
        Ok(SfStatus::Ok)
    })
}

/// Null-terminated library version.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
