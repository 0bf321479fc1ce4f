//! Lattice loading, trapped lifetime and release-recapture.

use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};

/// Fraction of a 3D Maxwell–Boltzmann gas with energy below `x·k_B·T`:
/// `1 − (1 + x + x²/2)·e^(−x)`.
pub fn maxwell_boltzmann_energy_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1e-2 {
        // Leading terms avoid cancellation: x³/6 − x⁴/8 + x⁵/20.
        return x * x * x * (1.0 / 6.0 - x / 8.0 + x * x / 20.0);
    }
    1.0 - (1.0 + x + 0.5 * x * x) * (-x).exp()
}

/// Fraction transferred from a thermal cloud at `temperature` into a trap of
/// depth `depth` (both in kelvin), scaled by the mode-matching efficiency.
pub fn lattice_transfer_fraction(temperature: f64, depth: f64, capture_efficiency: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::invalid("temperature must be > 0 for lattice transfer"));
    }
    if !(depth >= 0.0) {
        return Err(Error::invalid("trap depth must be >= 0"));
    }
    if !(0.0..=1.0).contains(&capture_efficiency) {
        return Err(Error::invalid("capture efficiency must lie in [0, 1]"));
    }
    Ok(capture_efficiency * maxwell_boltzmann_energy_cdf(depth / temperature))
}

/// Exponential trap loss `N₀·e^(−t/τ)`.
pub fn lattice_survival(t: f64, lifetime: f64) -> Result<f64> {
    if !(lifetime > 0.0) {
        return Err(Error::invalid(format!("lifetime must be > 0, got {lifetime:e}")));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid("hold time must be >= 0"));
    }
    Ok((-t / lifetime).exp())
}

/// Time for a cloud at `temperature` to leave a recapture region of radius
/// `capture_radius`: `r / sqrt(k_B·T/m)`.
pub fn ballistic_escape_time(capture_radius: f64, temperature: f64, mass: f64) -> Result<f64> {
    if !(capture_radius > 0.0 && temperature > 0.0 && mass > 0.0) {
        return Err(Error::invalid(
            "escape time needs positive radius, temperature and mass",
        ));
    }
    Ok(capture_radius / (BOLTZMANN * temperature / mass).sqrt())
}

/// Threshold below which a recaptured signal counts as "no atoms".
pub const RECAPTURE_DETECTION_THRESHOLD: f64 = 0.01;

/// Fraction recaptured after `hold`: trap decay with the lattice on, ballistic
/// loss `e^(−(t/τ_esc)²)` with it off.
pub fn recapture_fraction(hold: f64, lattice_on: bool, lifetime: f64, escape_time: f64) -> Result<f64> {
    if !(hold >= 0.0) {
        return Err(Error::invalid("hold time must be >= 0"));
    }
    if lattice_on {
        lattice_survival(hold, lifetime)
    } else {
        if !(escape_time > 0.0) {
            return Err(Error::invalid("escape time must be > 0"));
        }
        let r = hold / escape_time;
        Ok((-r * r).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_depth_transfers_nothing() {
        assert_eq!(lattice_transfer_fraction(2e-6, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sr_anchor() {
        // x = 2.5: 1 − 6.625·e^(−2.5)
        let f = lattice_transfer_fraction(2e-6, 5e-6, 1.0).unwrap();
        assert!((f - 0.456_186).abs() < 1e-5, "{f}");
        assert!((f - 0.5).abs() <= 0.10);
    }

    #[test]
    fn yb_anchor() {
        // x = 5/3: 1 − (1 + 5/3 + 25/18)·e^(−5/3)
        let f = lattice_transfer_fraction(30e-6, 50e-6, 1.0).unwrap();
        assert!((f - 0.234_004).abs() < 1e-6, "{f}");
        assert!(f > 0.20);
    }

    #[test]
    fn small_argument_series_is_continuous() {
        let a = maxwell_boltzmann_energy_cdf(0.01 - 1e-12);
        let b = maxwell_boltzmann_energy_cdf(0.01 + 1e-12);
        assert!((a - b).abs() / a < 1e-6);
    }

    #[test]
    fn invalid_temperature() {
        assert!(lattice_transfer_fraction(0.0, 1e-6, 1.0).is_err());
    }

    #[test]
    fn sr_lifetime() {
        let n = 5e5 * lattice_survival(1.4, 1.4).unwrap();
        assert!((n - 1.839_397e5).abs() < 1.0, "{n}");
        assert_eq!(lattice_survival(0.0, 1.4).unwrap(), 1.0);
        assert!(lattice_survival(1.0, 0.0).is_err());
    }

    #[test]
    fn yb_lifetime_after_300_ms() {
        let f = lattice_survival(0.3, 0.13).unwrap();
        assert!((f - 0.099_48).abs() < 1e-4, "{f}");
    }

    #[test]
    fn recapture_branches() {
        assert_eq!(recapture_fraction(0.0, true, 0.13, 0.006).unwrap(), 1.0);
        assert_eq!(recapture_fraction(0.0, false, 0.13, 0.006).unwrap(), 1.0);
        assert!(recapture_fraction(0.3, true, 0.13, 0.006).unwrap() > RECAPTURE_DETECTION_THRESHOLD);
        assert!(recapture_fraction(0.02, false, 0.13, 0.006).unwrap() < RECAPTURE_DETECTION_THRESHOLD);
    }
}
