use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rabi excitation probability after a square pulse,
/// `Ω²/(Ω²+δ²)·sin²(sqrt(Ω²+δ²)·T/2)`. Angular units throughout.
pub fn rabi_probability(detuning: f64, rabi: f64, pulse_time: f64) -> f64 {
    let w2 = rabi * rabi + detuning * detuning;
    if w2 == 0.0 {
        return 0.0;
    }
    let s = (w2.sqrt() * pulse_time / 2.0).sin();
    (rabi * rabi / w2 * s * s).clamp(0.0, 1.0)
}

/// FWHM in Hz of the π-pulse Rabi line for pulse length `pulse_time`,
/// found by bisection on the half-maximum point (≈ 0.799/T).
pub fn fourier_limited_fwhm(pulse_time: f64) -> Result<f64> {
    if !(pulse_time > 0.0) {
        return Err(Error::invalid("pulse time must be > 0"));
    }
    let rabi = PI / pulse_time;
    // P falls monotonically from 1 at δ = 0 to its first zero at δ = √3·Ω.
    let (mut lo, mut hi) = (0.0, 3f64.sqrt() * rabi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rabi_probability(mid, rabi, pulse_time) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(2.0 * 0.5 * (lo + hi) / (2.0 * PI))
}

/// Rabi frequency of the magnetically induced clock transition, `ξ·B·sqrt(I)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InducedRabi {
    /// rad/s
    pub rabi_frequency: f64,
    /// Set when no mixing field is applied and the transition stays closed.
    pub forbidden: bool,
}

pub fn induced_rabi_frequency(field: f64, intensity: f64, coupling: f64) -> Result<InducedRabi> {
    if !(field >= 0.0 && intensity >= 0.0) {
        return Err(Error::invalid("magnetic field and probe intensity must be >= 0"));
    }
    if !coupling.is_finite() {
        return Err(Error::invalid("induced coupling coefficient must be finite"));
    }
    Ok(InducedRabi {
        rabi_frequency: coupling * field * intensity.sqrt(),
        forbidden: field == 0.0,
    })
}

/// Coupling `ξ` that makes a pulse of `pulse_time` a π pulse at the given
/// field and intensity.
pub fn pi_pulse_coupling(field: f64, intensity: f64, pulse_time: f64) -> Result<f64> {
    if !(field > 0.0 && intensity > 0.0 && pulse_time > 0.0) {
        return Err(Error::invalid("π-pulse calibration needs positive B, I and T"));
    }
    Ok(PI / (pulse_time * field * intensity.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_pulse_on_resonance() {
        assert!((rabi_probability(0.0, PI, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn no_drive_no_excitation() {
        for d in [0.0, 1.0, -50.0] {
            assert_eq!(rabi_probability(d, 0.0, 1.0), 0.0);
        }
    }

    #[test]
    fn detuned_by_rabi_frequency() {
        // ½·sin²(π/√2) = 0.3165
        let p = rabi_probability(PI, PI, 1.0);
        let expect = 0.5 * (PI / 2f64.sqrt()).sin().powi(2);
        assert!((p - expect).abs() < 1e-15);
        assert!((p - 0.3165).abs() < 1e-4);
    }

    #[test]
    fn fourier_limit_values() {
        let f300 = fourier_limited_fwhm(0.3).unwrap();
        assert!((f300 - 2.66).abs() / 2.66 < 1e-2, "{f300}");
        let f1 = fourier_limited_fwhm(1.0).unwrap();
        assert!((f1 - 0.7987).abs() < 1e-3, "{f1}");
        let f05 = fourier_limited_fwhm(0.5).unwrap();
        assert!((f05 / f1 - 2.0).abs() < 1e-9);
        assert!(fourier_limited_fwhm(0.0).is_err());
    }

    #[test]
    fn induced_coupling_structure() {
        let r = induced_rabi_frequency(0.0, 1e3, 2.0).unwrap();
        assert_eq!(r.rabi_frequency, 0.0);
        assert!(r.forbidden);
        let a = induced_rabi_frequency(1e-3, 100.0, 2.0).unwrap().rabi_frequency;
        let b = induced_rabi_frequency(2e-3, 100.0, 2.0).unwrap().rabi_frequency;
        let c = induced_rabi_frequency(1e-3, 400.0, 2.0).unwrap().rabi_frequency;
        assert!((b / a - 2.0).abs() < 1e-12);
        assert!((c / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pi_pulse_calibration_inverts() {
        let xi = pi_pulse_coupling(1.1e-3, 1e4, 0.3).unwrap();
        let r = induced_rabi_frequency(1.1e-3, 1e4, xi).unwrap();
        assert!((r.rabi_frequency * 0.3 - PI).abs() < 1e-12);
        assert!(!r.forbidden);
    }
}
