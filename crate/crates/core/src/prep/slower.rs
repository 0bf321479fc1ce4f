//! Zeeman slower capture model and ideal field profile.

use serde::{Deserialize, Serialize};

use crate::constants::{BOHR_MAGNETON, HBAR, PLANCK};
use crate::error::{Error, Result};
use crate::species::SpeciesRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlowerConfig {
    /// m
    pub length: f64,
    /// Laser detuning from the cooling line, Hz (negative = red).
    pub detuning: f64,
    /// Fraction of the maximum scattering deceleration the design relies on.
    pub efficiency: f64,
    /// Target or measured (z, B) samples, e.g. a permanent-magnet profile.
    #[serde(default)]
    pub field_profile_samples: Vec<(f64, f64)>,
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
}

fn default_profile_points() -> usize {
    64
}

impl SlowerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::config("slower.length", "must be > 0"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::config("slower.efficiency", "must lie in (0, 1]"));
        }
        if self.profile_points < 2 {
            return Err(Error::config("slower.profile_points", "must be >= 2"));
        }
        Ok(())
    }
}

/// Maximum radiation-pressure deceleration `ħkΓ/(2m)` on the first cooling line.
pub fn max_deceleration(species: &SpeciesRecord) -> f64 {
    HBAR * species.cooling1.wavenumber() * species.cooling1.gamma() / (2.0 * species.mass)
}

/// Highest initial velocity brought to rest over the slower length,
/// `sqrt(2·η·a_max·L)`.
pub fn slower_capture_velocity(species: &SpeciesRecord, slower: &SlowerConfig) -> Result<f64> {
    if !(slower.length >= 0.0) {
        return Err(Error::invalid("slower length must be non-negative"));
    }
    if !(slower.efficiency > 0.0 && slower.efficiency <= 1.0) {
        return Err(Error::invalid("slower efficiency must lie in (0, 1]"));
    }
    Ok((2.0 * slower.efficiency * max_deceleration(species) * slower.length).sqrt())
}

/// Field offset that keeps the detuned laser resonant with atoms at the exit,
/// for a Δ(g·m) = 1 cooling transition.
pub fn bias_field(slower: &SlowerConfig) -> f64 {
    -PLANCK * slower.detuning / BOHR_MAGNETON
}

/// Field swing compensating the Doppler shift of the capture velocity.
pub fn doppler_field_span(species: &SpeciesRecord, capture_velocity: f64) -> f64 {
    PLANCK * capture_velocity / (species.cooling1.wavelength * BOHR_MAGNETON)
}

/// `B(z) = B_bias + B₀·sqrt(1 − z/L)` sampled on a uniform grid over [0, L].
pub fn slower_field_profile(species: &SpeciesRecord, slower: &SlowerConfig) -> Result<Vec<(f64, f64)>> {
    slower.validate()?;
    let vc = slower_capture_velocity(species, slower)?;
    let b0 = doppler_field_span(species, vc);
    let bias = bias_field(slower);
    let n = slower.profile_points;
    Ok((0..n)
        .map(|i| {
            let z = slower.length * i as f64 / (n - 1) as f64;
            (z, ideal_field(z, slower.length, bias, b0))
        })
        .collect())
}

fn ideal_field(z: f64, length: f64, bias: f64, span: f64) -> f64 {
    bias + span * (1.0 - z / length).max(0.0).sqrt()
}

/// RMS deviation of the configured `field_profile_samples` from the ideal
/// decelerator profile, T. `None` when no samples are configured.
pub fn profile_rms_deviation(species: &SpeciesRecord, slower: &SlowerConfig) -> Result<Option<f64>> {
    if slower.field_profile_samples.is_empty() {
        return Ok(None);
    }
    let vc = slower_capture_velocity(species, slower)?;
    let b0 = doppler_field_span(species, vc);
    let bias = bias_field(slower);
    let ss: f64 = slower
        .field_profile_samples
        .iter()
        .map(|&(z, b)| {
            let d = b - ideal_field(z, slower.length, bias, b0);
            d * d
        })
        .sum();
    Ok(Some((ss / slower.field_profile_samples.len() as f64).sqrt()))
}
