//! Time-of-flight thermometry and free fall.

use crate::constants::{BOLTZMANN, STANDARD_GRAVITY};
use crate::error::{Error, Result};
use crate::fit::fit_line;

/// Ballistic cloud size `sqrt(σ₀² + (k_B·T/m)·t²)`.
pub fn tof_expansion(sigma0: f64, temperature: f64, mass: f64, t: f64) -> Result<f64> {
    if !(sigma0 >= 0.0 && temperature >= 0.0 && mass > 0.0 && t >= 0.0) {
        return Err(Error::invalid("time-of-flight inputs must be non-negative (mass > 0)"));
    }
    Ok((sigma0 * sigma0 + BOLTZMANN * temperature / mass * t * t).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TofFit {
    /// K
    pub temperature: f64,
    /// m
    pub sigma0: f64,
}

/// Least-squares fit of `σ²` against `t²`; slope gives `k_B·T/m`.
pub fn fit_temperature(samples: &[(f64, f64)], mass: f64) -> Result<TofFit> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!(
            "temperature fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let t2: Vec<f64> = samples.iter().map(|(t, _)| t * t).collect();
    let s2: Vec<f64> = samples.iter().map(|(_, s)| s * s).collect();
    let line = fit_line(&t2, &s2)?;
    Ok(TofFit {
        temperature: line.slope * mass / BOLTZMANN,
        sigma0: line.intercept.max(0.0).sqrt(),
    })
}

/// Drop `g·t²/2` of an untrapped atom.
pub fn free_fall_displacement(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid("time must be >= 0"));
    }
    Ok(0.5 * STANDARD_GRAVITY * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::{species, Isotope};

    #[test]
    fn t_zero_and_zero_temperature() {
        let m = species(Isotope::Sr88).mass;
        assert_eq!(tof_expansion(3e-4, 22e-6, m, 0.0).unwrap(), 3e-4);
        assert_eq!(tof_expansion(3e-4, 0.0, m, 0.05).unwrap(), 3e-4);
    }

    #[test]
    fn sr_22_microkelvin_at_10_ms() {
        let m = species(Isotope::Sr88).mass;
        // k_B·22 µK / m = 2.0808e-3 m²/s²; σ² = 9e-8 + 2.0808e-7
        let s = tof_expansion(3e-4, 22e-6, m, 0.01).unwrap();
        let expect = (9e-8 + 1.380649e-23 * 22e-6 / m * 1e-4_f64).sqrt();
        assert!((s - expect).abs() < 1e-15);
        assert!((s - 5.4597e-4).abs() < 1e-7, "{s}");
    }

    fn synthetic(temperature: f64) -> Vec<(f64, f64)> {
        let m = species(Isotope::Sr88).mass;
        (1..=6)
            .map(|i| {
                let t = 2e-3 * i as f64;
                (t, tof_expansion(1e-4, temperature, m, t).unwrap())
            })
            .collect()
    }

    #[test]
    fn fit_inverts_expansion() {
        let m = species(Isotope::Sr88).mass;
        for temp in [2e-6, 22e-6, 2e-3] {
            let fit = fit_temperature(&synthetic(temp), m).unwrap();
            assert!((fit.temperature - temp).abs() / temp < 1e-6);
            assert!((fit.sigma0 - 1e-4).abs() / 1e-4 < 1e-6);
        }
    }

    #[test]
    fn fit_rejects_bad_designs() {
        let m = species(Isotope::Sr88).mass;
        assert!(fit_temperature(&synthetic(2e-6)[..2], m).is_err());
        let same = vec![(0.01, 1e-4), (0.01, 2e-4), (0.01, 3e-4)];
        assert!(fit_temperature(&same, m).is_err());
    }

    #[test]
    fn free_fall() {
        assert_eq!(free_fall_displacement(0.0).unwrap(), 0.0);
        let z = free_fall_displacement(0.012).unwrap();
        assert!((z - 7.0608e-4).abs() < 1e-8, "{z}");
        let z2 = free_fall_displacement(0.024).unwrap();
        assert!((z2 / z - 4.0).abs() < 1e-12);
    }
}
