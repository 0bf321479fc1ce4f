//! Project-wide physical constants (SI, CODATA 2018 exact where defined).

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.806_65;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;

/// Thermal energy `k_B·T` of a temperature in kelvin.
pub fn temperature_to_energy(temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be non-negative, got {temperature:e} K"
        )));
    }
    Ok(BOLTZMANN * temperature)
}

/// Inverse of [`temperature_to_energy`].
pub fn energy_to_temperature(energy: f64) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(Error::invalid(format!("energy must be non-negative, got {energy:e} J")));
    }
    Ok(energy / BOLTZMANN)
}

/// Optical frequency of a vacuum wavelength.
pub fn wavelength_to_frequency(wavelength: f64) -> f64 {
    SPEED_OF_LIGHT / wavelength
}
