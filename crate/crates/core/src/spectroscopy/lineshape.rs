//! Clock-line synthesis: Rabi carrier, Lorentzian broadening, motional
//! sidebands.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::rabi::{fourier_limited_fwhm, rabi_probability};
use crate::constants::{BOLTZMANN, PLANCK};
use crate::error::{Error, Result};
use crate::lattice::TrapDerived;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// rad/s
    pub rabi_frequency: f64,
    /// s
    pub pulse_time: f64,
    /// Hz
    pub detuning: f64,
    /// T
    pub magnetic_field: f64,
    /// W/m²
    pub probe_intensity: f64,
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pulse_time >= 0.0) {
            return Err(Error::config("probe.pulse_time", "must be >= 0"));
        }
        if !(self.probe_intensity >= 0.0) {
            return Err(Error::config("probe.probe_intensity", "must be >= 0"));
        }
        if !(self.magnetic_field >= 0.0) {
            return Err(Error::config("probe.magnetic_field", "must be >= 0"));
        }
        Ok(())
    }
}

/// Motional sidebands at ±ν_z with fixed relative weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sidebands {
    pub axial_frequency: f64,
    pub red_weight: f64,
    pub blue_weight: f64,
}

impl Sidebands {
    /// Weights `η²·n̄` (red) and `η²·(n̄+1)` (blue) for a thermal axial
    /// occupation `n̄` at `temperature`.
    pub fn thermal(trap: &TrapDerived, temperature: f64) -> Self {
        let nbar = mean_occupation(trap.axial_frequency, temperature);
        let eta2 = trap.lamb_dicke * trap.lamb_dicke;
        Sidebands {
            axial_frequency: trap.axial_frequency,
            red_weight: eta2 * nbar,
            blue_weight: eta2 * (nbar + 1.0),
        }
    }
}

/// Bose occupation of a mode at `frequency` Hz and `temperature` K.
pub fn mean_occupation(frequency: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (PLANCK * frequency / (BOLTZMANN * temperature)).exp_m1()
}

/// Quadrature grid for the carrier convolution, weights include `P(f')·h`.
#[derive(Debug, Clone)]
struct CarrierGrid {
    offsets: Vec<f64>,
    weights: Vec<f64>,
    hwhm: f64,
}

const MAX_GRID_POINTS: usize = 400_000;

impl CarrierGrid {
    fn build(rabi: f64, pulse_time: f64, broadening: f64) -> Self {
        let hwhm = broadening / 2.0;
        // Rabi wings carry (Ω/2π)²/R of area beyond ±R.
        let reach = (20.0 * broadening).max(2000.0 / pulse_time);
        let mut step = (1.0 / (16.0 * pulse_time)).min(broadening / 10.0);
        if 2.0 * reach / step > MAX_GRID_POINTS as f64 {
            step = 2.0 * reach / MAX_GRID_POINTS as f64;
        }
        let half = (reach / step).ceil() as i64;
        let mut offsets = Vec::with_capacity((2 * half + 1) as usize);
        let mut weights = Vec::with_capacity((2 * half + 1) as usize);
        for k in -half..=half {
            let f = k as f64 * step;
            let end = if k.abs() == half { 0.5 } else { 1.0 };
            offsets.push(f);
            weights.push(end * step * rabi_probability(2.0 * PI * f, rabi, pulse_time));
        }
        CarrierGrid { offsets, weights, hwhm }
    }

    fn eval(&self, f: f64) -> f64 {
        let g = self.hwhm;
        let g2 = g * g;
        let sum: f64 = self
            .offsets
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                let d = f - x;
                w / (d * d + g2)
            })
            .sum();
        sum * g / PI
    }
}

/// A clock line as a continuous function of probe detuning (Hz).
#[derive(Debug, Clone)]
pub struct Lineshape {
    rabi: f64,
    pulse_time: f64,
    broadening: f64,
    sidebands: Option<Sidebands>,
    grid: Option<CarrierGrid>,
}

impl Lineshape {
    /// Bare Rabi line.
    pub fn rabi(rabi: f64, pulse_time: f64) -> Result<Self> {
        Self::new(rabi, pulse_time, 0.0, None)
    }

    /// Carrier convolved with a Lorentzian of FWHM `broadening` (Hz), plus
    /// optional sidebands.
    pub fn new(rabi: f64, pulse_time: f64, broadening: f64, sidebands: Option<Sidebands>) -> Result<Self> {
        if !(pulse_time > 0.0) {
            return Err(Error::invalid("pulse time must be > 0"));
        }
        if !(broadening >= 0.0) || !broadening.is_finite() {
            return Err(Error::invalid(format!("broadening must be >= 0, got {broadening}")));
        }
        let grid = (broadening > 0.0).then(|| CarrierGrid::build(rabi, pulse_time, broadening));
        Ok(Lineshape {
            rabi,
            pulse_time,
            broadening,
            sidebands,
            grid,
        })
    }

    pub fn pulse_time(&self) -> f64 {
        self.pulse_time
    }

    pub fn rabi_frequency(&self) -> f64 {
        self.rabi
    }

    pub fn broadening(&self) -> f64 {
        self.broadening
    }

    pub fn sidebands(&self) -> Option<Sidebands> {
        self.sidebands
    }

    /// Carrier excitation at detuning `f` Hz.
    pub fn carrier(&self, f: f64) -> f64 {
        match &self.grid {
            Some(g) => g.eval(f),
            None => rabi_probability(2.0 * PI * f, self.rabi, self.pulse_time),
        }
    }

    /// Excitation fraction at detuning `f` Hz, carrier plus sidebands.
    pub fn eval(&self, f: f64) -> f64 {
        let mut p = self.carrier(f);
        if let Some(sb) = self.sidebands {
            p += sb.red_weight * self.carrier(f + sb.axial_frequency);
            p += sb.blue_weight * self.carrier(f - sb.axial_frequency);
        }
        p.clamp(0.0, 1.0)
    }

    /// Detuning of the positive-side half-maximum point of the carrier.
    pub fn half_width(&self) -> f64 {
        let peak = self.eval(0.0);
        let half = 0.5 * peak;
        let scale = fourier_limited_fwhm(self.pulse_time)
            .unwrap_or(1.0)
            .max(self.broadening);
        let step = scale / 50.0;
        let mut hi = step;
        while self.eval(hi) > half {
            hi += step;
        }
        let mut lo = hi - step;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Full width at half maximum, Hz.
    pub fn fwhm(&self) -> f64 {
        2.0 * self.half_width()
    }

    /// Magnitude of `dP/df` at the positive half-maximum point, 1/Hz.
    pub fn discriminator_slope(&self) -> f64 {
        let hw = self.half_width();
        let h = hw * 1e-4;
        -(self.eval(hw + h) - self.eval(hw - h)) / (2.0 * h)
    }

    /// Samples the noiseless line on `detunings`.
    pub fn sample(&self, detunings: &[f64], atoms: f64) -> Spectrum {
        Spectrum {
            detunings: detunings.to_vec(),
            excitation_fractions: detunings.iter().map(|&f| self.eval(f)).collect(),
            atom_number_per_point: atoms,
        }
    }
}

/// Builds the interrogation lineshape for a probe, optional trap and
/// ensemble temperature.
pub fn synthesize_lineshape(
    probe: &ProbeConfig,
    trap: Option<&TrapDerived>,
    broadening: f64,
    temperature: f64,
) -> Result<Lineshape> {
    probe.validate()?;
    if broadening < 0.0 {
        return Err(Error::invalid("broadening must be >= 0"));
    }
    let sidebands = trap
        .filter(|t| t.axial_frequency > 0.0)
        .map(|t| Sidebands::thermal(t, temperature));
    Lineshape::new(probe.rabi_frequency, probe.pulse_time, broadening, sidebands)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub detunings: Vec<f64>,
    pub excitation_fractions: Vec<f64>,
    pub atom_number_per_point: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// FWHM of the highest feature, by linear interpolation between samples.
    /// Assumes detunings are sorted.
    pub fn fwhm(&self) -> Option<f64> {
        let y = &self.excitation_fractions;
        let x = &self.detunings;
        let (imax, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        let half = ymax / 2.0;
        let mut left = None;
        for i in (1..=imax).rev() {
            if y[i - 1] <= half {
                left = Some(x[i - 1] + (half - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]));
                break;
            }
        }
        let mut right = None;
        for i in imax..y.len().saturating_sub(1) {
            if y[i + 1] <= half {
                right = Some(x[i] + (y[i] - half) * (x[i + 1] - x[i]) / (y[i] - y[i + 1]));
                break;
            }
        }
        Some(right? - left?)
    }

    /// Detuning of the largest sample within `window` of `center`.
    pub fn peak_near(&self, center: f64, window: f64) -> Option<f64> {
        self.detunings
            .iter()
            .zip(&self.excitation_fractions)
            .filter(|(f, _)| (**f - center).abs() <= window)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(f, _)| *f)
    }
}

/// Scan grid: `points` samples over ±`span`/2 around the carrier and, when
/// sidebands are present, around each sideband.
pub fn scan_grid(line: &Lineshape, span: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    let mut centers = vec![0.0];
    if let Some(sb) = line.sidebands() {
        if sb.axial_frequency > span {
            centers.insert(0, -sb.axial_frequency);
            centers.push(sb.axial_frequency);
        }
    }
    centers
        .into_iter()
        .flat_map(|c| (0..points).map(move |i| c - span / 2.0 + span * i as f64 / (points - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi_line(t: f64) -> Lineshape {
        Lineshape::rabi(PI / t, t).unwrap()
    }

    #[test]
    fn unbroadened_fwhm_is_fourier_limit() {
        let l = pi_line(0.3);
        let f = fourier_limited_fwhm(0.3).unwrap();
        assert!((l.fwhm() - f).abs() / f < 1e-9);
    }

    #[test]
    fn negative_broadening_rejected() {
        assert!(Lineshape::new(1.0, 0.3, -1.0, None).is_err());
    }

    #[test]
    fn broadened_line_width_and_monotonicity() {
        let t = 0.3;
        let f0 = fourier_limited_fwhm(t).unwrap();
        let mut last = 0.0;
        for b in [0.0, 1.0, 10.0, 100.0] {
            let w = Lineshape::new(PI / t, t, b, None).unwrap().fwhm();
            assert!(w >= f0 * 0.999);
            assert!(w >= last);
            last = w;
        }
    }

    #[test]
    fn sr_410_hz_line() {
        let t = 0.3;
        let b = 410.0 - fourier_limited_fwhm(t).unwrap();
        let w = Lineshape::new(PI / t, t, b, None).unwrap().fwhm();
        assert!((w - 410.0).abs() / 410.0 < 0.05, "{w}");
    }

    #[test]
    fn thermal_occupation() {
        // hν/k_BT = 1 → n̄ = 1/(e − 1)
        let f = BOLTZMANN * 1e-6 / PLANCK;
        assert!((mean_occupation(f, 1e-6) - 1.0 / (1f64.exp() - 1.0)).abs() < 1e-12);
        assert_eq!(mean_occupation(1e4, 0.0), 0.0);
    }

    #[test]
    fn spectrum_fwhm_matches_line() {
        let l = pi_line(1.0);
        let grid: Vec<f64> = (0..2001).map(|i| -5.0 + 0.005 * i as f64).collect();
        let s = l.sample(&grid, 1.0);
        let w = s.fwhm().unwrap();
        assert!((w - l.fwhm()).abs() < 1e-3, "{w}");
    }

    #[test]
    fn sidebands_sit_at_trap_frequency() {
        let sb = Sidebands {
            axial_frequency: 38e3,
            red_weight: 0.05,
            blue_weight: 0.1,
        };
        let l = Lineshape::new(PI / 0.3, 0.3, 400.0, Some(sb)).unwrap();
        let grid = scan_grid(&l, 4000.0, 401);
        let s = l.sample(&grid, 1.0);
        let blue = s.peak_near(38e3, 2000.0).unwrap();
        let red = s.peak_near(-38e3, 2000.0).unwrap();
        assert!((blue - 38e3).abs() <= 10.0);
        assert!((red + 38e3).abs() <= 10.0);
    }
}
