//! Physical constants, thermal photon occupation and material dispersion.
//!
//! Everything here is SI. Conductors follow the Drude skin-depth form
//! `eps = 1 + 2i (c / (omega * delta))^2` with an `exp(-i omega t)` time
//! convention, so passive media have `Im eps > 0`.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// CODATA 2018 SI values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Vacuum permeability [H/m].
    pub mu0: f64,
    /// Reduced Planck constant [J s].
    pub hbar: f64,
    /// Boltzmann constant [J/K].
    pub kb: f64,
    /// Speed of light [m/s].
    pub c: f64,
    /// Bohr magneton [J/T].
    pub mu_b: f64,
    /// Electron spin g-factor.
    pub g_s: f64,
}

pub const SI: PhysicalConstants = PhysicalConstants {
    mu0: 1.256_637_062_12e-6,
    hbar: 1.054_571_817e-34,
    kb: 1.380_649e-23,
    c: 299_792_458.0,
    mu_b: 9.274_010_078_3e-24,
    g_s: 2.0,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        SI
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantityError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("dielectric permittivity must be >= 1, got {0}")]
    Permittivity(f64),
    #[error("unknown material preset '{name}'; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error("superconductor enhancement cap must be >= 1, got {0}")]
    EnhancementCap(f64),
    #[error("the 'custom' preset has no parameters; construct a Material directly")]
    CustomPreset,
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, QuantityError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(QuantityError::NonPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, QuantityError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(QuantityError::Negative { name, value })
    }
}

/// Ambient temperature.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ThermalState {
    kelvin: f64,
}

impl ThermalState {
    pub fn new(kelvin: f64) -> Result<Self, QuantityError> {
        non_negative("temperature", kelvin).map(|kelvin| Self { kelvin })
    }

    pub fn kelvin(&self) -> f64 {
        self.kelvin
    }

    pub fn occupation(&self, omega: f64) -> Result<f64, QuantityError> {
        thermal_occupation(omega, self.kelvin)
    }
}

/// Mean Bose-Einstein photon number per mode, `1 / (exp(hbar w / kB T) - 1)`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64, QuantityError> {
    positive("angular frequency", omega)?;
    non_negative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = SI.hbar * omega / (SI.kb * temperature);
    // exp_m1 keeps full precision in the classical limit x << 1.
    Ok(1.0 / x.exp_m1())
}

/// `delta = sqrt(2 / (mu0 omega sigma))`.
pub fn skin_depth_from_conductivity(sigma: f64, omega: f64) -> Result<f64, QuantityError> {
    positive("conductivity", sigma)?;
    positive("angular frequency", omega)?;
    Ok((2.0 / (SI.mu0 * omega * sigma)).sqrt())
}

/// `sigma = 2 / (mu0 omega delta^2)`.
pub fn conductivity_from_skin_depth(delta: f64, omega: f64) -> Result<f64, QuantityError> {
    positive("skin depth", delta)?;
    positive("angular frequency", omega)?;
    Ok(2.0 / (SI.mu0 * omega * delta * delta))
}

/// Temperature dependence of the normal-electron conductivity below `T_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairBreakingModel {
    /// `sigma_n * min(cap, exp(2 Delta0 (1/kT - 1/kTc)))`.
    CappedBoltzmann { cap: f64 },
    /// Conductivity pinned to the normal-state value at every temperature.
    NormalState,
}

impl Default for PairBreakingModel {
    fn default() -> Self {
        PairBreakingModel::CappedBoltzmann { cap: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superconductor {
    /// Transition temperature [K].
    pub tc: f64,
    /// Zero-temperature gap in units of `kB T_c`.
    pub gap_ratio: f64,
    /// Conductivity just above `T_c` [S/m].
    pub sigma_normal: f64,
    /// Operating temperature [K].
    pub temperature: f64,
    pub model: PairBreakingModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Vacuum,
    Dielectric { eps_r: f64 },
    Conductor { sigma: f64 },
    /// Ohmic conductor specified by its skin depth at a reference angular frequency.
    SkinDepth { delta: f64, reference_omega: f64 },
    Superconductor(Superconductor),
}

/// Effective conductivity and whether the film is in its normal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveConductivity {
    pub sigma: f64,
    pub normal_state: bool,
}

impl Material {
    pub fn dielectric(eps_r: f64) -> Result<Self, QuantityError> {
        if !(eps_r >= 1.0 && eps_r.is_finite()) {
            return Err(QuantityError::Permittivity(eps_r));
        }
        Ok(Material::Dielectric { eps_r })
    }

    pub fn conductor(sigma: f64) -> Result<Self, QuantityError> {
        positive("conductivity", sigma).map(|sigma| Material::Conductor { sigma })
    }

    pub fn skin_depth(delta: f64, reference_omega: f64) -> Result<Self, QuantityError> {
        positive("skin depth", delta)?;
        positive("reference angular frequency", reference_omega)?;
        Ok(Material::SkinDepth { delta, reference_omega })
    }

    pub fn superconductor(sc: Superconductor) -> Result<Self, QuantityError> {
        positive("transition temperature", sc.tc)?;
        positive("gap ratio", sc.gap_ratio)?;
        positive("normal conductivity", sc.sigma_normal)?;
        positive("temperature", sc.temperature)?;
        if let PairBreakingModel::CappedBoltzmann { cap } = sc.model {
            if !(cap >= 1.0 && cap.is_finite()) {
                return Err(QuantityError::EnhancementCap(cap));
            }
        }
        Ok(Material::Superconductor(sc))
    }

    /// DC-like conductivity, `None` for insulators.
    pub fn conductivity(&self) -> Option<f64> {
        match self {
            Material::Vacuum | Material::Dielectric { .. } => None,
            Material::Conductor { sigma } => Some(*sigma),
            Material::SkinDepth { delta, reference_omega } => {
                Some(2.0 / (SI.mu0 * reference_omega * delta * delta))
            }
            Material::Superconductor(sc) => Some(superconductor_effective_conductivity(sc).sigma),
        }
    }

    /// Skin depth at `omega`, `None` for insulators.
    pub fn skin_depth_at(&self, omega: f64) -> Option<f64> {
        self.conductivity().map(|s| (2.0 / (SI.mu0 * omega * s)).sqrt())
    }

    pub fn is_lossy(&self) -> bool {
        self.conductivity().is_some()
    }

    /// Same material with its temperature-dependent parts evaluated at `kelvin`.
    pub fn at_temperature(&self, kelvin: f64) -> Material {
        match self {
            Material::Superconductor(sc) => Material::Superconductor(Superconductor { temperature: kelvin, ..*sc }),
            other => other.clone(),
        }
    }
}

/// Relative permittivity at `omega`.
pub fn drude_permittivity(material: &Material, omega: f64) -> Result<Complex64, QuantityError> {
    positive("angular frequency", omega)?;
    Ok(match material {
        Material::Vacuum => Complex64::new(1.0, 0.0),
        Material::Dielectric { eps_r } => Complex64::new(*eps_r, 0.0),
        lossy => {
            // 2 (c / (omega delta))^2 = 2 c^2 mu0 sigma / (2 omega) = sigma / (eps0 omega)
            let sigma = lossy.conductivity().expect("lossy material has a conductivity");
            let delta2 = 2.0 / (SI.mu0 * omega * sigma);
            Complex64::new(1.0, 2.0 * SI.c * SI.c / (omega * omega * delta2))
        }
    })
}

/// Two-fluid style conductivity of a superconductor below `T_c`.
pub fn superconductor_effective_conductivity(sc: &Superconductor) -> EffectiveConductivity {
    if sc.temperature >= sc.tc {
        return EffectiveConductivity { sigma: sc.sigma_normal, normal_state: true };
    }
    let enhancement = match sc.model {
        PairBreakingModel::NormalState => 1.0,
        PairBreakingModel::CappedBoltzmann { cap } => {
            // Delta0 = gap_ratio * kB Tc, so 2 Delta0 / kB (1/T - 1/Tc).
            let exponent = 2.0 * sc.gap_ratio * (sc.tc / sc.temperature - 1.0);
            exponent.exp().min(cap)
        }
    };
    EffectiveConductivity { sigma: sc.sigma_normal * enhancement, normal_state: false }
}

pub const PRESET_NAMES: [&str; 5] = ["Cu", "Al", "Nb_normal", "Nb_super", "custom"];

const PRESET_OMEGA: f64 = 2.0 * PI * 560.0e3;
const NB_TC: f64 = 9.3;
const NB_GAP_RATIO: f64 = 2.1;
const NB_SIGMA_NORMAL: f64 = 2.0e9;

/// Named materials. Normal metals are pinned to their skin depth at 560 kHz.
pub fn material_preset(name: &str, temperature: f64) -> Result<Material, QuantityError> {
    match name {
        "Cu" => Material::skin_depth(85.0e-6, PRESET_OMEGA),
        "Al" => Material::skin_depth(110.0e-6, PRESET_OMEGA),
        "Nb_normal" => Material::conductor(NB_SIGMA_NORMAL),
        "Nb_super" => Material::superconductor(Superconductor {
            tc: NB_TC,
            gap_ratio: NB_GAP_RATIO,
            sigma_normal: NB_SIGMA_NORMAL,
            temperature,
            model: PairBreakingModel::default(),
        }),
        "custom" => Err(QuantityError::CustomPreset),
        other => Err(QuantityError::UnknownPreset {
            name: other.to_string(),
            valid: PRESET_NAMES.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const W400: f64 = 2.0 * PI * 400.0e3;
    const W560: f64 = 2.0 * PI * 560.0e3;

    #[test]
    fn occupation_limits() {
        assert_eq!(thermal_occupation(W400, 0.0).unwrap(), 0.0);
        let n = thermal_occupation(W400, 400.0).unwrap();
        // kT/(hbar w) - 1/2 in the classical limit
        let x = SI.hbar * W400 / (SI.kb * 400.0);
        assert!(rel(n, 1.0 / x - 0.5) < 1e-9);
        assert!(rel(n, 2.08e7) < 5e-3);
        // Boltzmann tail
        let w = 50.0 * SI.kb * 1.0 / SI.hbar;
        let n = thermal_occupation(w, 1.0).unwrap();
        assert!(rel(n, (-50.0f64).exp()) < 1e-12);
    }

    #[test]
    fn occupation_rejects_bad_frequency() {
        assert!(thermal_occupation(0.0, 300.0).is_err());
        assert!(thermal_occupation(-1.0, 300.0).is_err());
        assert!(thermal_occupation(1.0, -1.0).is_err());
        assert!(ThermalState::new(-3.0).is_err());
    }

    #[test]
    fn skin_depth_anchors() {
        assert!(rel(skin_depth_from_conductivity(2.0e9, W560).unwrap(), 15.0e-6) < 0.01);
        // Handbook conductivities land within a few percent of the quoted depths.
        assert!(rel(skin_depth_from_conductivity(5.8e7, W560).unwrap(), 85.0e-6) < 0.05);
        assert!(rel(skin_depth_from_conductivity(3.5e7, W560).unwrap(), 110.0e-6) < 0.05);
        assert!(skin_depth_from_conductivity(0.0, W560).is_err());
        assert!(conductivity_from_skin_depth(1e-6, -W560).is_err());
    }

    #[test]
    fn conductivity_from_depth_values() {
        let sigma = conductivity_from_skin_depth(1.0e-6, W560).unwrap();
        assert!(rel(sigma, 4.5227e11) < 1e-3);
        // resistivity of order 2e-12 Ohm m
        assert!(rel(1.0 / sigma, 2.211e-12) < 1e-3);
        let sigma = conductivity_from_skin_depth(103.0e-6, W400).unwrap();
        assert!(rel(sigma, 5.969e7) < 1e-3);
        let back = skin_depth_from_conductivity(sigma, W400).unwrap();
        assert!(rel(back, 103.0e-6) < 1e-12);
    }

    #[test]
    fn permittivity_values() {
        let m = Material::skin_depth(103.0e-6, W400).unwrap();
        let eps = drude_permittivity(&m, W400).unwrap();
        assert!(rel(eps.norm(), 2.68e12) < 0.01);
        assert!(eps.im / eps.re > 1e11);
        assert_eq!(drude_permittivity(&Material::Vacuum, W400).unwrap(), Complex64::new(1.0, 0.0));
        let weak = Material::skin_depth(1.0e6, W400).unwrap();
        let eps = drude_permittivity(&weak, W400).unwrap();
        assert_eq!(eps.re, 1.0);
        assert!(eps.im < 1e-2);
    }

    #[test]
    fn niobium_conductivity() {
        let above = material_preset("Nb_super", 9.4).unwrap();
        let Material::Superconductor(sc) = above else { panic!() };
        let s = superconductor_effective_conductivity(&sc);
        assert!(s.normal_state);
        assert_eq!(s.sigma, 2.0e9);

        let at_tc = Superconductor { temperature: 9.3, ..sc };
        assert_eq!(superconductor_effective_conductivity(&at_tc).sigma, 2.0e9);

        let cold = Superconductor { temperature: 4.0, ..sc };
        let s = superconductor_effective_conductivity(&cold);
        assert!(!s.normal_state);
        assert!(rel(s.sigma, 2.0e11) < 1e-12);
        let delta = skin_depth_from_conductivity(s.sigma, W560).unwrap();
        assert!(delta > 1.0e-6 && delta < 2.0e-6, "{delta}");
    }

    #[test]
    fn presets() {
        let cu = material_preset("Cu", 300.0).unwrap();
        assert!(rel(cu.skin_depth_at(W560).unwrap(), 85.0e-6) < 1e-12);
        let al = material_preset("Al", 300.0).unwrap();
        assert!(rel(al.skin_depth_at(W560).unwrap(), 110.0e-6) < 1e-12);
        assert_eq!(material_preset("custom", 1.0), Err(QuantityError::CustomPreset));
        let err = material_preset("Ag", 1.0).unwrap_err().to_string();
        assert!(err.contains("Nb_super") && err.contains("Cu"), "{err}");
        let Material::Superconductor(nb) = material_preset("Nb_super", 4.0).unwrap() else { panic!() };
        assert_eq!(nb.tc, 9.3);
        assert_eq!(nb.gap_ratio, 2.1);
    }
}
