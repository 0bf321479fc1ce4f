//! Magneto-optical trap loading.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Loading curve `N(t) = R·τ·(1 − e^(−t/τ))`.
pub fn mot_load(rate: f64, loss_time: f64, t: f64) -> Result<f64> {
    if !(loss_time > 0.0) {
        return Err(Error::invalid(format!("MOT loss time must be > 0, got {loss_time:e}")));
    }
    if !(rate >= 0.0) {
        return Err(Error::invalid("MOT loading rate must be >= 0"));
    }
    if t.is_infinite() {
        return Ok(rate * loss_time);
    }
    Ok(rate * loss_time * -(-t / loss_time).exp_m1())
}

/// Atom source feeding the 3D MOT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MotSource {
    /// Direct loading from the slowed beam.
    #[default]
    None,
    /// Pre-cooled beam from a 2D MOT.
    TwoDMot { multiplier: f64 },
}

/// Loading-rate multiplier of the source.
pub fn mot_enhancement(source: MotSource) -> Result<f64> {
    match source {
        MotSource::None => Ok(1.0),
        MotSource::TwoDMot { multiplier } if multiplier >= 1.0 => Ok(multiplier),
        MotSource::TwoDMot { multiplier } => Err(Error::invalid(format!(
            "2D-MOT multiplier must be >= 1, got {multiplier}"
        ))),
    }
}
