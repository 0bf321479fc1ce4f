//! 1D standing-wave lattice: depth, trap frequencies, Lamb-Dicke parameter,
//! motional sidebands and the residual lattice light shift.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR, PLANCK};
use crate::error::{Error, Result};
use crate::species::SpeciesRecord;

/// Depth per unit intensity-like quantity `P/w²`, K·m²/W, pinned so that
/// 280 mW focused to a 50 µm waist in the retro-reflected 813 nm Sr lattice
/// gives a 5 µK deep trap. The retro-reflection (4× antinode intensity) is
/// folded in.
pub const DEFAULT_DEPTH_COEFFICIENT: f64 = 5e-6 * 50e-6 * 50e-6 / 0.28;

/// Relative distance from the magic wavelength beyond which the scalar depth
/// calibration is not trusted.
pub const MAGIC_WAVELENGTH_WINDOW: f64 = 0.05;

/// Lattice light-shift slope (Hz of shift per Hz of lattice detuning per
/// recoil of depth). Keeps a 10 MHz lattice frequency excursion in a 5 µK Sr
/// lattice below 1e-17 of the clock frequency.
pub const DEFAULT_LIGHT_SHIFT_SLOPE: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeGeometry {
    #[default]
    RetroReflected,
    Cavity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// W
    pub input_power: f64,
    /// m
    pub waist: f64,
    /// m
    pub wavelength: f64,
    /// Power buildup of an enhancement cavity (1 for a free-space lattice).
    #[serde(default = "unit")]
    pub enhancement_factor: f64,
    #[serde(default)]
    pub geometry: LatticeGeometry,
    /// Overrides [`DEFAULT_DEPTH_COEFFICIENT`] for this species.
    #[serde(default)]
    pub depth_coefficient: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

impl LatticeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0) {
            return Err(Error::config("lattice.waist", "must be > 0"));
        }
        if !(self.input_power >= 0.0) {
            return Err(Error::config("lattice.input_power", "must be >= 0"));
        }
        if !(self.enhancement_factor >= 1.0) {
            return Err(Error::config("lattice.enhancement_factor", "must be >= 1"));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::config("lattice.wavelength", "must be > 0"));
        }
        if let Some(c) = self.depth_coefficient {
            if !(c > 0.0) {
                return Err(Error::config("lattice.depth_coefficient", "must be > 0"));
            }
        }
        Ok(())
    }

    pub fn coefficient(&self) -> f64 {
        self.depth_coefficient.unwrap_or(DEFAULT_DEPTH_COEFFICIENT)
    }

    pub fn circulating_power(&self) -> f64 {
        self.enhancement_factor * self.input_power
    }
}

fn check_wavelength(cfg: &LatticeConfig, species: &SpeciesRecord) -> Result<()> {
    let magic = species.lattice_magic_wavelength;
    let rel = (cfg.wavelength - magic).abs() / magic;
    if rel > MAGIC_WAVELENGTH_WINDOW {
        return Err(Error::invalid(format!(
            "lattice wavelength {:.1} nm is {:.1}% away from the {} magic wavelength {:.1} nm",
            cfg.wavelength * 1e9,
            rel * 100.0,
            species.name,
            magic * 1e9
        )));
    }
    Ok(())
}

/// Trap depth in kelvin, `C·enhancement·P/w²`.
pub fn trap_depth(cfg: &LatticeConfig, species: &SpeciesRecord) -> Result<f64> {
    cfg.validate()?;
    check_wavelength(cfg, species)?;
    Ok(cfg.coefficient() * cfg.circulating_power() / (cfg.waist * cfg.waist))
}

/// Circulating power needed for `depth` at `waist`.
pub fn required_power(depth: f64, waist: f64, coefficient: f64) -> Result<f64> {
    if !(depth >= 0.0 && waist > 0.0 && coefficient > 0.0) {
        return Err(Error::invalid(
            "required power needs depth >= 0, waist > 0, coefficient > 0",
        ));
    }
    Ok(depth * waist * waist / coefficient)
}

/// Axial and radial trap frequencies in Hz for a lattice of depth `depth` (K).
pub fn trap_frequencies(depth: f64, wavelength: f64, mass: f64, waist: f64) -> Result<(f64, f64)> {
    if !(depth >= 0.0 && wavelength > 0.0 && mass > 0.0 && waist > 0.0) {
        return Err(Error::invalid("trap frequencies need depth >= 0 and positive λ, m, w"));
    }
    let u = BOLTZMANN * depth;
    let omega_z = 2.0 * PI / wavelength * (2.0 * u / mass).sqrt();
    let omega_r = (4.0 * u / (mass * waist * waist)).sqrt();
    Ok((omega_z / (2.0 * PI), omega_r / (2.0 * PI)))
}

/// `η = k_clock·sqrt(ħ/(2mω_z))`.
pub fn lamb_dicke(axial_frequency: f64, species: &SpeciesRecord) -> Result<f64> {
    if !(axial_frequency > 0.0) {
        return Err(Error::invalid("Lamb-Dicke parameter needs a positive trap frequency"));
    }
    let omega = 2.0 * PI * axial_frequency;
    Ok(2.0 * PI / species.clock_wavelength * (HBAR / (2.0 * species.mass * omega)).sqrt())
}

/// Red and blue motional sideband frequencies around `carrier`.
pub fn sideband_positions(carrier: f64, axial_frequency: f64) -> (f64, f64) {
    (carrier - axial_frequency, carrier + axial_frequency)
}

/// Lattice photon recoil `h²/(2mλ²)` expressed in kelvin.
pub fn recoil_temperature(species: &SpeciesRecord, wavelength: f64) -> f64 {
    PLANCK * PLANCK / (2.0 * species.mass * wavelength * wavelength) / BOLTZMANN
}

/// Residual light shift `s·Δ·(U₀/E_r)` in Hz for a lattice detuned `detuning`
/// Hz from the magic frequency.
pub fn lattice_light_shift(depth: f64, detuning: f64, slope: f64, recoil: f64) -> Result<f64> {
    if !(recoil > 0.0) {
        return Err(Error::invalid("recoil energy must be > 0"));
    }
    Ok(slope * detuning * (depth / recoil))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapDerived {
    /// K
    pub depth: f64,
    pub axial_frequency: f64,
    pub radial_frequency: f64,
    pub lamb_dicke: f64,
    pub recoil: f64,
    /// `η_LD < 1`
    pub lamb_dicke_regime: bool,
}

pub fn derive_trap(cfg: &LatticeConfig, species: &SpeciesRecord) -> Result<TrapDerived> {
    let depth = trap_depth(cfg, species)?;
    let (axial, radial) = trap_frequencies(depth, cfg.wavelength, species.mass, cfg.waist)?;
    let eta = if axial > 0.0 {
        lamb_dicke(axial, species)?
    } else {
        f64::INFINITY
    };
    Ok(TrapDerived {
        depth,
        axial_frequency: axial,
        radial_frequency: radial,
        lamb_dicke: eta,
        recoil: recoil_temperature(species, cfg.wavelength),
        lamb_dicke_regime: eta < 1.0,
    })
}
