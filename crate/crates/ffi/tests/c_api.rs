use spinflip_ffi::*;
use std::ffi::CStr;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

const W400: f64 = 2.0 * PI * 400.0e3;
const W560: f64 = 2.0 * PI * 560.0e3;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sf_last_error()) }.to_string_lossy().into_owned()
}

fn rb87(omega: f64) -> *mut SfTransition {
    let mut t = ptr::null_mut();
    assert_eq!(sf_transition_rb87(omega, &mut t), SfStatus::Ok);
    t
}

#[test]
fn free_space_lifetime_anchor() {
    let t = rb87(W400);
    let mut tau = 0.0;
    assert_eq!(sf_free_space_lifetime(t, &mut tau), SfStatus::Ok);
    assert!((tau / 3e25 - 1.0).abs() < 0.05, "{tau}");
    unsafe { sf_transition_free(t) };
}

#[test]
fn flip_rate_matches_library() {
    let t = rb87(W560);
    let mut stack = ptr::null_mut();
    assert_eq!(sf_stack_thick(1e-6, W560, &mut stack), SfStatus::Ok);
    let mut gamma = 0.0;
    let mut green = SfGreen { in_plane: 0.0, normal: 0.0, free: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    assert_eq!(sf_flip_rate(t, 50e-6, stack, 300.0, 0.0, &mut gamma, &mut green), SfStatus::Ok);

    let lib_t = spinflip::spin_flip::SpinTransition::rb87(W560).unwrap();
    let lib_stack = spinflip::layered_green::LayerStack::thick(spinflip::quantities::Material::skin_depth(1e-6, W560).unwrap());
    let lib = spinflip::spin_flip::flip_rate(&lib_t, 50e-6, &lib_stack, 300.0, &Default::default()).unwrap();
    assert_eq!(gamma, lib.gamma);
    assert_eq!(green.normal, lib.green.normal);
    assert!(green.normal > green.in_plane && green.evaluations > 0);

    // out_green is optional
    assert_eq!(sf_flip_rate(t, 50e-6, stack, 300.0, 0.0, &mut gamma, ptr::null_mut()), SfStatus::Ok);
    unsafe {
        sf_stack_free(stack);
        sf_transition_free(t);
    }
}

#[test]
fn green_over_film() {
    let mut stack = ptr::null_mut();
    assert_eq!(sf_stack_film(103e-6, W400, 2e-6, 11.7, &mut stack), SfStatus::Ok);
    let mut g = SfGreen { in_plane: 0.0, normal: 0.0, free: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    assert_eq!(sf_green(10e-6, W400, stack, 1e-6, &mut g), SfStatus::Ok);
    assert!(g.in_plane > 0.0 && g.normal > 0.0 && g.free > 0.0);
    unsafe { sf_stack_free(stack) };
}

#[test]
fn vacuum_stack_gives_free_space() {
    let t = rb87(W400);
    let mut stack = ptr::null_mut();
    assert_eq!(sf_stack_vacuum(&mut stack), SfStatus::Ok);
    let mut gamma = 0.0;
    assert_eq!(sf_flip_rate(t, 1e-6, stack, 0.0, 0.0, &mut gamma, ptr::null_mut()), SfStatus::Ok);
    let mut tau0 = 0.0;
    sf_free_space_lifetime(t, &mut tau0);
    assert!((gamma * tau0 - 1.0).abs() < 1e-8);
    unsafe {
        sf_stack_free(stack);
        sf_transition_free(t);
    }
}

#[test]
fn scalar_helpers() {
    let mut n = 0.0;
    assert_eq!(sf_thermal_occupation(W400, 0.0, &mut n), SfStatus::Ok);
    assert_eq!(n, 0.0);
    let mut delta = 0.0;
    assert_eq!(sf_skin_depth(2e9, W560, &mut delta), SfStatus::Ok);
    assert!(delta > 1e-5 && delta < 2e-5, "{delta}");

    let mut tau = 0.0;
    let mut regime = SfRegime::Crossover;
    let status = sf_asymptotic_lifetime(50e-6, 1e-6, f64::INFINITY, W560, 300.0, 1e25, 0.0, &mut tau, &mut regime);
    assert_eq!(status, SfStatus::Ok);
    assert_eq!(regime, SfRegime::ThickSmallDelta);
    assert!(tau > 0.0);
    sf_asymptotic_lifetime(50e-6, 40e-6, f64::INFINITY, W560, 300.0, 1e25, 0.0, &mut tau, &mut regime);
    assert_eq!(regime, SfRegime::Crossover);
    assert!(tau.is_nan());

    let version = unsafe { CStr::from_ptr(sf_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_reported() {
    let mut stack = ptr::null_mut();
    assert_eq!(sf_stack_thick(-1.0, W560, &mut stack), SfStatus::InvalidArgument);
    assert!(stack.is_null());
    assert!(last_error().contains("positive"), "{}", last_error());

    assert_eq!(sf_stack_film(1e-6, W560, 0.0, 11.7, &mut stack), SfStatus::InvalidArgument);
    assert_eq!(sf_stack_film(1e-6, W560, 1e-6, 0.5, &mut stack), SfStatus::InvalidArgument);
    assert_eq!(sf_stack_vacuum(ptr::null_mut()), SfStatus::NullPointer);
    assert!(last_error().contains("null"));

    let mut t = ptr::null_mut();
    assert_eq!(sf_transition_hyperfine(W560, 2.0, 2.0, 2.0, 1.5, &mut t), SfStatus::InvalidArgument);
    assert!(t.is_null());

    let mut gamma = 0.0;
    assert_eq!(sf_flip_rate(ptr::null(), 1e-6, ptr::null(), 300.0, 0.0, &mut gamma, ptr::null_mut()), SfStatus::NullPointer);

    let tr = rb87(W560);
    assert_eq!(sf_stack_vacuum(&mut stack), SfStatus::Ok);
    assert_eq!(sf_flip_rate(tr, -1.0, stack, 300.0, 0.0, &mut gamma, ptr::null_mut()), SfStatus::InvalidArgument);
    assert!(last_error().contains("distance"), "{}", last_error());
    unsafe {
        sf_stack_free(stack);
        sf_transition_free(tr);
        sf_stack_free(ptr::null_mut());
        sf_transition_free(ptr::null_mut());
    }
}

#[test]
fn error_state_is_per_thread() {
    let mut out = 0.0;
    assert_eq!(sf_skin_depth(-1.0, W560, &mut out), SfStatus::InvalidArgument);
    let here = last_error();
    let there = std::thread::spawn(last_error).join().unwrap();
    assert!(!here.is_empty());
    assert!(there.is_empty());
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "spinflip.h"

int main(void) {
    SfTransition *t = NULL;
    SfStack *s = NULL;
    double tau0 = 0.0, gamma = 0.0;
    SfGreen g;
    if (sf_transition_rb87(2.0 * M_PI * 560e3, &t) != SF_STATUS_OK) return 1;
    if (sf_stack_thick(1e-6, 2.0 * M_PI * 560e3, &s) != SF_STATUS_OK) return 2;
    if (sf_free_space_lifetime(t, &tau0) != SF_STATUS_OK) return 3;
    if (sf_flip_rate(t, 50e-6, s, 300.0, 0.0, &gamma, &g) != SF_STATUS_OK) return 4;
    if (sf_stack_thick(-1.0, 1.0, &s) != SF_STATUS_INVALID_ARGUMENT || sf_last_error()[0] == '\0') return 5;
    printf("%.17g %.17g\n", tau0, 1.0 / gamma);
    sf_stack_free(s);
    sf_transition_free(t);
    return 0;
}
"#;

/// Compiles a C program against the generated header; links and runs it when
/// the static library is available.
#[test]
fn header_compiles_as_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("spinflip.h").exists(), "header not generated");
    let header = std::fs::read_to_string(include.join("spinflip.h")).unwrap();
    for f in ["sf_last_error", "sf_stack_thick", "sf_flip_rate", "sf_green", "sf_asymptotic_lifetime", "sf_stack_free"] {
        assert!(header.contains(f), "{f} missing from header");
    }

    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; header syntax not checked");
        return;
    };
    let dir = tempdir();
    let src = dir.join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let syntax = Command::new(&cc)
        .args(["-std=c99", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-fsyntax-only"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    let lib = target_dir().join("libspinflip_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping link step", lib.display());
        return;
    }
    let exe = dir.join("smoke");
    let link = Command::new(&cc)
        .args(["-std=c99", "-D_DEFAULT_SOURCE", "-O1"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let values: Vec<f64> = text.split_whitespace().map(|v| v.parse().unwrap()).collect();
    assert!(values[0] > 1e24 && values[1] > 1.0 && values[1] < 100.0, "{text}");
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    match Command::new(&cc).arg("--version").output() {
        Ok(o) if o.status.success() => Ok(cc),
        _ => Err(()),
    }
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spinflip-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
