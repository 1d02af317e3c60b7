#![allow(dead_code)]
//! Finite-difference oracle for the magnetic Sommerfeld integrands.
//!
//! The reflected *electric* dyadic is built from its plane-wave expansion
//!
//! ```text
//! G_R(r, r') = (i / 8 pi^2) int d^2q (1/kz) [r_s s s + r_p p+ p-] exp(i q.(rho - rho') + i kz (z + z'))
//! ```
//!
//! with reflection coefficients from a characteristic-matrix (transfer-matrix)
//! calculation. The curl from the left and the curl from the right are then
//! applied by central differences with step `1e-4 d`, and the result at
//! coincidence is compared with the closed-form integrands used by the library.
//!
//! Right-curl convention: `(G x grad')_ij = eps_jkl d'_k G_il`, the one that
//! gives `+k^3 / 6 pi` for free space (checked below on the analytic tensor).

use num_complex::Complex64;
use spinflip::layered_green::{im_curlcurl_scattered, GreenOptions, LayerStack};
use spinflip::quantities::{drude_permittivity, Material, SI};
use std::f64::consts::PI;

pub type Mat3 = [[Complex64; 3]; 3];

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `H_ij = eps_imn eps_jkl D_mk A_nl`, where `D_mk` approximates `d_m d'_k` of
/// the scalar phase and `A` is the displacement-independent dyad.
pub fn contract(d: &Mat3, a: &Mat3) -> Mat3 {
    let mut h = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = ZERO;
            for m in 0..3 {
                for n in 0..3 {
                    let e1 = levi_civita(i, m, n);
                    if e1 == 0.0 {
                        continue;
                    }
                    for k in 0..3 {
                        for l in 0..3 {
                            let e2 = levi_civita(j, k, l);
                            if e2 != 0.0 {
                                acc += d[m][k] * a[n][l] * (e1 * e2);
                            }
                        }
                    }
                }
            }
            h[i][j] = acc;
        }
    }
    h
}

pub fn unit(axis: usize, step: f64) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[axis] = step;
    v
}

/// Mixed central difference `d_m d'_k f(r, r')` at `r = r' = r0`.
pub fn mixed_differences<F: Fn([f64; 3], [f64; 3]) -> Complex64>(f: F, step: f64) -> Mat3 {
    let mut d = [[ZERO; 3]; 3];
    for m in 0..3 {
        for k in 0..3 {
            let a = unit(m, step);
            let b = unit(k, step);
            let neg = |v: [f64; 3]| v.map(|x| -x);
            let val = f(a, b) - f(a, neg(b)) - f(neg(a), b) + f(neg(a), neg(b));
            d[m][k] = val / (4.0 * step * step);
        }
    }
    d
}

/// Reflection coefficients (s, p) of vacuum / film(h) / substrate from the
/// characteristic matrix of the film.
pub fn transfer_matrix_reflection(eps: [Complex64; 3], h: f64, k0: f64, kz0: Complex64) -> (Complex64, Complex64) {
    let kz0sq = kz0 * kz0;
    let kz = |e: Complex64| {
        let w = (e - 1.0) * k0 * k0 + kz0sq;
        let r = w.sqrt();
        if r.im < 0.0 {
            -r
        } else {
            r
        }
    };
    let kz1 = kz(eps[1]);
    let kz2 = kz(eps[2]);
    let beta = kz1 * h;
    let (c, s) = (beta.cos(), beta.sin());
    let reflect = |y0: Complex64, y1: Complex64, y2: Complex64| {
        let m11 = c;
        let m12 = -I * s / y1;
        let m21 = -I * y1 * s;
        let m22 = c;
        let num = y0 * m11 + y0 * y2 * m12 - m21 - y2 * m22;
        let den = y0 * m11 + y0 * y2 * m12 + m21 + y2 * m22;
        // entries grow like exp(Im beta); rescale before the complex division
        let scale = den.re.abs().max(den.im.abs());
        (num / scale) / (den / scale)
    };
    let rs = reflect(kz0, kz1, kz2);
    let rp = reflect(kz0 / eps[0], kz1 / eps[1], kz2 / eps[2]);
    (rs, rp)
}

pub struct Setup {
    pub k0: f64,
    pub d: f64,
    pub eps: [Complex64; 3],
    pub h: f64,
    pub step: f64,
    pub include_p: bool,
    pub angles: usize,
}

impl Setup {
    /// `int_0^2pi dphi FD[curl A e^{i phase} curl']` for one radial `q` with
    /// normal wavenumber `kz0`. The `1/kz` Jacobian is left to the caller.
    pub fn angular(&self, q: f64, kz0: Complex64) -> Mat3 {
        let (rs, rp) = transfer_matrix_reflection(self.eps, self.h, self.k0, kz0);
        let mut acc = [[ZERO; 3]; 3];
        let n = self.angles;
        for a in 0..n {
            let phi = 2.0 * PI * (a as f64 + 0.5) / n as f64;
            let (sp, cp) = phi.sin_cos();
            let qhat = [cp, sp, 0.0];
            let shat = [sp, -cp, 0.0];
            // p+ = (q z - kz qhat)/k0 (upgoing), p- = (q z + kz qhat)/k0 (downgoing)
            let p_up = [-kz0 * qhat[0] / self.k0, -kz0 * qhat[1] / self.k0, Complex64::new(q / self.k0, 0.0)];
            let p_down = [kz0 * qhat[0] / self.k0, kz0 * qhat[1] / self.k0, Complex64::new(q / self.k0, 0.0)];
            let mut dyad = [[ZERO; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    dyad[i][j] = rs * shat[i] * shat[j];
                    if self.include_p {
                        dyad[i][j] += rp * p_up[i] * p_down[j];
                    }
                }
            }
            let d = self.d;
            let phase = |r: [f64; 3], rp_: [f64; 3]| -> Complex64 {
                let lateral = q * (qhat[0] * (r[0] - rp_[0]) + qhat[1] * (r[1] - rp_[1]));
                (I * lateral + I * kz0 * (2.0 * d + r[2] + rp_[2])).exp()
            };
            let dd = mixed_differences(phase, self.step);
            let h = contract(&dd, &dyad);
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += h[i][j] * (2.0 * PI / n as f64);
                }
            }
        }
        acc
    }

    /// Full `curl G_R curl'` at coincidence. Radial integration in `kz`
    /// (propagating) and `kappa` (evanescent) by Gauss-Legendre panels that
    /// are bisected until halving changes no entry by more than `1e-9` of the
    /// coarse total; guided-wave poles of the stack need the refinement.
    pub fn curl_curl(&self) -> Mat3 {
        let rule = gauss_legendre(32);
        let k0 = self.k0;
        let prop = |kz: f64| {
            // q dq / kz = -dkz, kz from k0 down to 0
            let q = ((k0 - kz) * (k0 + kz)).max(0.0).sqrt();
            self.angular(q, Complex64::new(kz, 0.0))
        };
        let evan = |kappa: f64| {
            // q dq / kz = -i dkappa
            let q = (kappa * kappa + k0 * k0).sqrt();
            self.angular(q, Complex64::new(0.0, kappa)).map(|row| row.map(|v| v * (-I)))
        };
        let u = 1.0 / self.d;
        let mut evan_edges: Vec<f64> = (0..=16).map(|p| 0.25 * u * p as f64).collect();
        evan_edges.extend((5..=40).map(|p| u * p as f64));
        let prop_edges: Vec<f64> = (0..=8).map(|p| k0 * p as f64 / 8.0).collect();

        let pieces = |tol: f64| {
            let mut out = [[ZERO; 3]; 3];
            for (edges, body) in [(&prop_edges, &prop as &dyn Fn(f64) -> Mat3), (&evan_edges, &evan)] {
                for w in edges.windows(2) {
                    let part = match tol {
                        t if t > 0.0 => adaptive(body, w[0], w[1], &rule, t, 0),
                        _ => fixed(body, w[0], w[1], &rule),
                    };
                    out = add(out, part);
                }
            }
            out
        };
        let coarse = pieces(0.0);
        let scale = coarse.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        pieces(1e-9 * scale).map(|row| row.map(|v| v * I / (8.0 * PI * PI)))
    }
}

pub fn add(a: Mat3, b: Mat3) -> Mat3 {
    let mut out = a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += b[i][j];
        }
    }
    out
}

pub fn fixed(f: &dyn Fn(f64) -> Mat3, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> Mat3 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out = [[ZERO; 3]; 3];
    for (x, w) in rule.0.iter().zip(&rule.1) {
        let m = f(mid + half * x);
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += m[i][j] * (w * half);
            }
        }
    }
    out
}

pub fn adaptive(f: &dyn Fn(f64) -> Mat3, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>), tol: f64, depth: u32) -> Mat3 {
    let whole = fixed(f, a, b, rule);
    let m = 0.5 * (a + b);
    let halves = add(fixed(f, a, m, rule), fixed(f, m, b, rule));
    let change = (0..9).map(|k| (whole[k / 3][k % 3] - halves[k / 3][k % 3]).norm()).fold(0.0, f64::max);
    if change <= tol || depth >= 30 {
        halves
    } else {
        add(adaptive(f, a, m, rule, tol, depth + 1), adaptive(f, m, b, rule, tol, depth + 1))
    }
}

/// Nodes and weights on [-1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Regular `Im G_free(R)` for `G = (U + grad grad / k^2) e^{ikR} / 4 pi R`.
pub fn im_free_dyadic(r: [f64; 3], k: f64) -> [[f64; 3]; 3] {
    let rr = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let x = k * rr;
    // (j0 - j1/x) delta_ij + k^2 (3 j1/x - j0)/x^2 R_i R_j
    let (a, b) = if x < 1e-2 {
        let x2 = x * x;
        (2.0 / 3.0 - x2 * (1.0 / 6.0 - 1.0 / 30.0) + x2 * x2 * (1.0 / 120.0 - 1.0 / 840.0), 1.0 / 15.0 - x2 / 210.0)
    } else {
        let j0 = x.sin() / x;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        (j0 - j1 / x, (3.0 * j1 / x - j0) / (x * x))
    };
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { a } else { 0.0 };
            g[i][j] = k / (4.0 * PI) * (delta + b * k * k * r[i] * r[j]);
        }
    }
    g
}


/// Worst relative disagreement between the oracle and the library.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub in_plane: f64,
    pub normal: f64,
    /// Largest off-diagonal entry relative to the larger diagonal value.
    pub off_diagonal: f64,
}

impl OracleReport {
    pub fn worst(&self) -> f64 {
        self.in_plane.max(self.normal).max(self.off_diagonal)
    }
}

pub fn compare(setup: &Setup, stack: &LayerStack, omega: f64) -> OracleReport {
    let h = setup.curl_curl();
    let opts = GreenOptions { rel_tol: 1e-11, max_subdivisions: 4000 };
    let g = im_curlcurl_scattered(setup.d, omega, stack, &opts).unwrap();
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let scale = g.in_plane.abs().max(g.normal.abs());
    let mut off_diagonal = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                off_diagonal = off_diagonal.max(h[i][j].im.abs() / scale);
            }
        }
    }
    OracleReport {
        in_plane: rel(h[0][0].im, g.in_plane).max(rel(h[1][1].im, g.in_plane)),
        normal: rel(h[2][2].im, g.normal),
        off_diagonal,
    }
}

/// Oracle and library on one `(d, delta, h)` point over a silicon substrate,
/// at the frequency where `k0 = 0.5 / length_unit`.
pub fn grid_point(length_unit: f64, d: f64, delta: f64, h: f64) -> OracleReport {
    let k0 = 0.5 / length_unit;
    let omega = k0 * SI.c;
    let substrate = Material::dielectric(11.7).unwrap();
    let film = Material::skin_depth(delta, omega).unwrap();
    let stack = LayerStack::new(film.clone(), h, substrate.clone()).unwrap();
    let eps = [
        Complex64::new(1.0, 0.0),
        drude_permittivity(&film, omega).unwrap(),
        drude_permittivity(&substrate, omega).unwrap(),
    ];
    let setup = Setup { k0, d, eps, h, step: 1e-4 * d, include_p: true, angles: 16 };
    compare(&setup, &stack, omega)
}
