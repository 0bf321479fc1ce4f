//! Local-oscillator fractional-frequency noise: white, flicker and
//! random-walk FM plus linear drift.
//!
//! One-sided PSD conventions: `S_y(f) = h₀ + h₋₁/f + h₋₂/f²`. The matching
//! Allan variances are `h₀/(2τ)`, `2·ln2·h₋₁` and `(2π²/3)·h₋₂·τ`.

use std::f64::consts::{LN_2, PI};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Longest trace `synthesize` will build.
pub const MAX_TRACE_LEN: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// 1/Hz
    pub white_fm_h0: f64,
    pub flicker_fm_hm1: f64,
    /// Hz
    pub random_walk_hm2: f64,
    /// fractional frequency per second
    pub linear_drift: f64,
    /// Flicker Allan floor. When set and `flicker_fm_hm1` is zero the
    /// coefficient is derived from it.
    pub flicker_floor_sigma: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("white_fm_h0", self.white_fm_h0),
            ("flicker_fm_hm1", self.flicker_fm_hm1),
            ("random_walk_hm2", self.random_walk_hm2),
            ("flicker_floor_sigma", self.flicker_floor_sigma),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(format!("noise.{name}"), "must be finite and >= 0"));
            }
        }
        if !self.linear_drift.is_finite() {
            return Err(Error::config("noise.linear_drift", "must be finite"));
        }
        Ok(())
    }

    /// Flicker coefficient actually synthesized.
    pub fn effective_hm1(&self) -> f64 {
        if self.flicker_fm_hm1 == 0.0 && self.flicker_floor_sigma > 0.0 {
            flicker_floor_spec(self.flicker_floor_sigma).flicker_fm_hm1
        } else {
            self.flicker_fm_hm1
        }
    }

    /// White-FM coefficient giving Allan deviation `sigma` at `tau`.
    pub fn white_for(sigma: f64, tau: f64) -> f64 {
        2.0 * sigma * sigma * tau
    }
}

/// Noise fragment whose flicker-FM Allan plateau equals `floor`:
/// `h₋₁ = floor²/(2·ln2)`.
pub fn flicker_floor_spec(floor: f64) -> NoiseSpec {
    let floor = floor.max(0.0);
    NoiseSpec {
        flicker_fm_hm1: floor * floor / (2.0 * LN_2),
        flicker_floor_sigma: floor,
        ..NoiseSpec::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    pub samples: Vec<f64>,
    /// s
    pub dt: f64,
    pub seed: Option<u64>,
    pub stream_id: Option<u64>,
    pub label: String,
}

impl FrequencyTrace {
    pub fn new(samples: Vec<f64>, dt: f64, label: impl Into<String>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid("trace dt must be > 0"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("trace must hold at least one sample"));
        }
        Ok(FrequencyTrace {
            samples,
            dt,
            seed: None,
            stream_id: None,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Sample times `i·dt`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| i as f64 * self.dt)
    }
}

/// Builds a trace of `n` samples spaced `dt` as the sum of independently
/// generated noise components.
pub fn synthesize(spec: &NoiseSpec, n: usize, dt: f64, rng: &mut RngStream) -> Result<FrequencyTrace> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::invalid("trace length must be >= 1"));
    }
    if n > MAX_TRACE_LEN {
        return Err(Error::invalid(format!(
            "trace length {n} exceeds the {MAX_TRACE_LEN} sample limit"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be > 0"));
    }
    let mut y = vec![0.0; n];

    if spec.white_fm_h0 > 0.0 {
        let sigma = (spec.white_fm_h0 / (2.0 * dt)).sqrt();
        for v in y.iter_mut() {
            *v += rng.normal(sigma);
        }
    }

    let hm1 = spec.effective_hm1();
    if hm1 > 0.0 {
        for (v, f) in y.iter_mut().zip(flicker_fm(hm1, n, dt, rng)) {
            *v += f;
        }
    }

    if spec.random_walk_hm2 > 0.0 {
        let step = (2.0 * PI * PI * spec.random_walk_hm2 * dt).sqrt();
        let mut acc = 0.0;
        for v in y.iter_mut() {
            acc += rng.normal(step);
            *v += acc;
        }
    }

    if spec.linear_drift != 0.0 {
        for (i, v) in y.iter_mut().enumerate() {
            *v += spec.linear_drift * (i as f64 * dt);
        }
    }

    Ok(FrequencyTrace {
        samples: y,
        dt,
        seed: Some(rng.seed()),
        stream_id: Some(rng.stream_id()),
        label: "oscillator".into(),
    })
}

/// Flicker FM by spectral shaping: Gaussian amplitudes scaled to
/// `sqrt(h₋₁/f·Δf)/2` with random phase in every positive-frequency bin, then
/// an inverse FFT. The record is generated at twice the requested length
/// (power of two, bounded) and truncated so the plateau holds out to the
/// longest averaging times.
fn flicker_fm(hm1: f64, n: usize, dt: f64, rng: &mut RngStream) -> Vec<f64> {
    let m = (2 * n)
        .next_power_of_two()
        .min(MAX_TRACE_LEN)
        .max(n.next_power_of_two());
    let df = 1.0 / (m as f64 * dt);
    let mut spectrum = vec![Complex::new(0.0, 0.0); m];
    for k in 1..m.div_ceil(2) {
        let f = k as f64 * df;
        let c = (hm1 / f * df).sqrt() / 2.0;
        let z = Complex::new(c * rng.standard_normal(), c * rng.standard_normal());
        spectrum[k] = z;
        spectrum[m - k] = z.conj();
    }
    let fft = FftPlanner::new().plan_fft_inverse(m);
    fft.process(&mut spectrum);
    spectrum.into_iter().take(n).map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spec_zero_trace() {
        let t = synthesize(&NoiseSpec::default(), 100, 1.0, &mut RngStream::new(1, 0)).unwrap();
        assert!(t.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_length_rejected() {
        assert!(synthesize(&NoiseSpec::default(), 0, 1.0, &mut RngStream::new(1, 0)).is_err());
        assert!(synthesize(&NoiseSpec::default(), MAX_TRACE_LEN + 1, 1.0, &mut RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn floor_to_hm1() {
        let s = flicker_floor_spec(5e-16);
        assert!((s.flicker_fm_hm1 - 1.8034e-31).abs() < 1e-35, "{}", s.flicker_fm_hm1);
        assert_eq!(flicker_floor_spec(0.0).flicker_fm_hm1, 0.0);
    }

    #[test]
    fn white_coefficient_for_target() {
        assert_eq!(NoiseSpec::white_for(1e-15, 1.0), 2e-30);
    }

    #[test]
    fn drift_is_deterministic_ramp() {
        let spec = NoiseSpec {
            linear_drift: 1e-15,
            ..Default::default()
        };
        let t = synthesize(&spec, 10, 2.0, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(t.samples[5], 1e-15 * 10.0);
    }

    #[test]
    fn white_sample_variance() {
        let spec = NoiseSpec {
            white_fm_h0: 2e-30,
            ..Default::default()
        };
        let t = synthesize(&spec, 100_000, 0.5, &mut RngStream::new(2, 0)).unwrap();
        let var = t.samples.iter().map(|v| v * v).sum::<f64>() / t.len() as f64;
        let expect = 2e-30 / (2.0 * 0.5);
        assert!((var - expect).abs() / expect < 0.02);
    }

    #[test]
    fn same_seed_same_trace() {
        let spec = NoiseSpec {
            white_fm_h0: 1e-30,
            flicker_fm_hm1: 1e-31,
            random_walk_hm2: 1e-34,
            linear_drift: 1e-18,
            flicker_floor_sigma: 0.0,
        };
        let a = synthesize(&spec, 1000, 1.0, &mut RngStream::new(8, 8)).unwrap();
        let b = synthesize(&spec, 1000, 1.0, &mut RngStream::new(8, 8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_coefficient_rejected() {
        let spec = NoiseSpec {
            white_fm_h0: -1.0,
            ..Default::default()
        };
        assert!(spec.validate().is_err());
    }
}
