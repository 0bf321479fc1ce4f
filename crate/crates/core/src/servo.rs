//! Digital clock lock: square-wave interrogation at the two half-maximum
//! points of the atomic line, error formation, PI correction.
//!
//! Sign convention: the laser frequency is `LO − correction`. A laser above
//! the line gives a positive error and the correction grows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::FrequencyTrace;
use crate::rng::RngStream;
use crate::spectroscopy::Lineshape;

/// Corrections beyond this multiple of the line FWHM abort the lock.
pub const DIVERGENCE_FWHM_MULTIPLE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServoConfig {
    pub gain_p: f64,
    pub gain_i: f64,
    /// Full cycle time including preparation dead time, s.
    pub cycle_time: f64,
    /// Interrogation time, s.
    pub probe_time: f64,
    /// Probe offset from the line center, Hz. `None` uses FWHM/2.
    #[serde(default)]
    pub modulation_halfwidth: Option<f64>,
    pub atom_number: f64,
}

impl ServoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain_p >= 0.0 && self.gain_i >= 0.0) {
            return Err(Error::config("servo.gain", "gains must be >= 0"));
        }
        if !(self.probe_time > 0.0 && self.cycle_time > self.probe_time) {
            return Err(Error::config("servo.cycle_time", "must exceed the probe time"));
        }
        if let Some(hw) = self.modulation_halfwidth {
            if !(hw > 0.0) {
                return Err(Error::config("servo.modulation_halfwidth", "must be > 0"));
            }
        }
        if !(self.atom_number >= 1.0) {
            return Err(Error::config("servo.atom_number", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeSide {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl ProbeSide {
    pub fn sign(self) -> f64 {
        match self {
            ProbeSide::Plus => 1.0,
            ProbeSide::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockRecord {
    pub cycle: usize,
    pub side: ProbeSide,
    pub excitation: f64,
    /// Latest error, Hz (zero until the first probe pair completes).
    pub error: f64,
    /// Accumulated correction, Hz.
    pub correction: f64,
}

/// Frequency error of the laser relative to the line from one probe pair,
/// `(p₋ − p₊)/(2·slope)` with `slope = |dP/df|` at the half-maximum points.
pub fn error_signal(p_plus: f64, p_minus: f64, slope: f64) -> Result<f64> {
    if !(slope > 0.0) {
        return Err(Error::invalid("discriminator slope must be > 0"));
    }
    Ok((p_minus - p_plus) / (2.0 * slope))
}

#[derive(Debug, Clone)]
pub struct LockOutcome {
    pub locked: FrequencyTrace,
    pub records: Vec<LockRecord>,
    pub halfwidth: f64,
    pub slope: f64,
}

/// Locks the oscillator `lo` (fractional frequency relative to `nu0`) to a
/// line at `line_center` Hz. The LO trace sample interval must divide the
/// cycle time.
pub fn run_lock(
    lo: &FrequencyTrace,
    line_center: f64,
    nu0: f64,
    servo: &ServoConfig,
    line: &Lineshape,
    rng: &mut RngStream,
) -> Result<LockOutcome> {
    servo.validate()?;
    if !(nu0 > 0.0) {
        return Err(Error::invalid("clock frequency must be > 0"));
    }
    let per_cycle = (servo.cycle_time / lo.dt).round();
    if per_cycle < 1.0 || (per_cycle * lo.dt - servo.cycle_time).abs() > 1e-9 * servo.cycle_time {
        return Err(Error::invalid(format!(
            "cycle time {} s is not a multiple of the LO sample interval {} s",
            servo.cycle_time, lo.dt
        )));
    }
    let per_cycle = per_cycle as usize;
    let fwhm = line.fwhm();
    let halfwidth = servo.modulation_halfwidth.unwrap_or(fwhm / 2.0);
    let slope = {
        let h = halfwidth * 1e-4;
        -(line.eval(halfwidth + h) - line.eval(halfwidth - h)) / (2.0 * h)
    };
    if !(slope > 0.0) {
        return Err(Error::invalid(
            "line has no negative slope at the modulation half-width",
        ));
    }
    let limit = DIVERGENCE_FWHM_MULTIPLE * fwhm;
    let atoms = servo.atom_number.round() as u64;

    let mut locked = lo.clone();
    locked.label = "locked".into();
    locked.seed = Some(rng.seed());
    locked.stream_id = Some(rng.stream_id());
    let cycles = lo.len() / per_cycle;
    let mut records = Vec::with_capacity(cycles);
    let mut correction = 0.0_f64;
    let mut error = 0.0;
    let mut prev_error = 0.0;
    let mut p_plus = 0.0;

    for cycle in 0..cycles {
        let span = cycle * per_cycle..(cycle + 1) * per_cycle;
        let side = if cycle % 2 == 0 {
            ProbeSide::Plus
        } else {
            ProbeSide::Minus
        };
        let mean_y = lo.samples[span.clone()].iter().sum::<f64>() / per_cycle as f64;
        let offset = mean_y * nu0 - correction - line_center;
        let p = line.eval(offset + side.sign() * halfwidth);
        let excitation = rng.projection_fraction(atoms, p);
        let shift = correction / nu0;
        for v in &mut locked.samples[span] {
            *v -= shift;
        }
        match side {
            ProbeSide::Plus => p_plus = excitation,
            ProbeSide::Minus => {
                error = error_signal(p_plus, excitation, slope)?;
                correction += servo.gain_i * error + servo.gain_p * (error - prev_error);
                prev_error = error;
                if !(correction.abs() <= limit) {
                    return Err(Error::Divergence {
                        cycle,
                        correction,
                        limit,
                    });
                }
            }
        }
        records.push(LockRecord {
            cycle,
            side,
            excitation,
            error,
            correction,
        });
    }
    let shift = correction / nu0;
    for v in &mut locked.samples[cycles * per_cycle..] {
        *v -= shift;
    }
    Ok(LockOutcome {
        locked,
        records,
        halfwidth,
        slope,
    })
}

/// Projection-noise limited instability `σ(τ) = (Δν/ν₀)·N^(−1/2)·sqrt(T_c/τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QpnLimit {
    /// σ at τ = T_c.
    pub sigma_at_cycle: f64,
    pub cycle_time: f64,
}

impl QpnLimit {
    pub fn sigma(&self, tau: f64) -> f64 {
        self.sigma_at_cycle * (self.cycle_time / tau).sqrt()
    }
}

pub fn qpn_limit(fwhm: f64, nu0: f64, atoms: f64, cycle_time: f64) -> Result<QpnLimit> {
    if !(fwhm > 0.0 && nu0 > 0.0 && atoms > 0.0 && cycle_time > 0.0) {
        return Err(Error::invalid("QPN limit needs positive FWHM, ν₀, N and T_c"));
    }
    Ok(QpnLimit {
        sigma_at_cycle: fwhm / nu0 / atoms.sqrt(),
        cycle_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn error_zero_on_resonance_and_sign() {
        assert_eq!(error_signal(0.4, 0.4, 0.3).unwrap(), 0.0);
        // laser high: the + probe sits further out and sees less excitation
        assert!(error_signal(0.3, 0.6, 0.3).unwrap() > 0.0);
        assert!(error_signal(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn qpn_scalings() {
        let q = qpn_limit(2.66, 4.295e14, 1e5, 1.5).unwrap();
        assert!((q.sigma(1.0) - 2.4e-17).abs() < 0.05e-17, "{}", q.sigma(1.0));
        let q4 = qpn_limit(2.66, 4.295e14, 4e5, 1.5).unwrap();
        assert!((q.sigma(1.0) / q4.sigma(1.0) - 2.0).abs() < 1e-12);
        assert!((q.sigma(1.5) - 2.66 / 4.295e14 / 1e5f64.sqrt()).abs() < 1e-30);
    }

    #[test]
    fn cycle_must_be_multiple_of_dt() {
        let lo = FrequencyTrace::new(vec![0.0; 100], 1.0, "lo").unwrap();
        let line = Lineshape::rabi(PI / 0.3, 0.3).unwrap();
        let cfg = ServoConfig {
            gain_p: 0.0,
            gain_i: 0.5,
            cycle_time: 1.5,
            probe_time: 0.3,
            modulation_halfwidth: None,
            atom_number: 1e4,
        };
        assert!(run_lock(&lo, 0.0, 4.3e14, &cfg, &line, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = ServoConfig {
            gain_p: 0.0,
            gain_i: 0.5,
            cycle_time: 0.2,
            probe_time: 0.3,
            modulation_halfwidth: None,
            atom_number: 1e4,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn divergence_reported() {
        // Absurd gain on a line far off: corrections blow up.
        let lo = FrequencyTrace::new(vec![0.0; 400], 1.5, "lo").unwrap();
        let line = Lineshape::rabi(PI / 0.3, 0.3).unwrap();
        let cfg = ServoConfig {
            gain_p: 0.0,
            gain_i: 1e9,
            cycle_time: 1.5,
            probe_time: 0.3,
            modulation_halfwidth: None,
            atom_number: 1e4,
        };
        let r = run_lock(&lo, 0.5, 4.3e14, &cfg, &line, &mut RngStream::new(0, 0));
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }
}
