//! Chirped search for the clock line when the laser frequency is only
//! coarsely known.
//!
//! Each interrogation sweeps the clock laser linearly across a window during
//! the interaction time. An atom whose resonance lies inside the window is
//! transferred with the Landau–Zener probability `1 − exp(−πΩ²/(2r))`, `r`
//! the sweep rate in rad/s². Windows are visited at the guess first and then
//! alternately above and below it. Once a window lights up, its halves are
//! probed in turn to narrow down the line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChirpSearchConfig {
    /// Full chirp excursion per sweep, Hz.
    pub span: f64,
    /// Cycle period of one sweep, s.
    pub period: f64,
    /// Probe duration during which the chirp runs, s.
    pub interaction_time: f64,
    /// Probe Rabi frequency, rad/s.
    pub rabi_frequency: f64,
    pub atoms: f64,
    /// Technical detection noise on the excitation fraction (1σ).
    pub detection_noise: f64,
    /// Detection threshold in units of the detection noise.
    #[serde(default = "default_threshold")]
    pub threshold_sigma: f64,
    /// Number of windows visited: guess, +1, −1, +2, −2, ...
    #[serde(default = "default_windows")]
    pub max_windows: usize,
    /// Halvings after detection.
    #[serde(default = "default_refinements")]
    pub refinements: usize,
}

fn default_threshold() -> f64 {
    5.0
}

fn default_windows() -> usize {
    5
}

fn default_refinements() -> usize {
    4
}

impl ChirpSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.span > 0.0) {
            return Err(Error::config("search.span", "must be > 0"));
        }
        if !(self.period > 0.0 && self.interaction_time > 0.0 && self.interaction_time <= self.period) {
            return Err(Error::config("search.interaction_time", "must be > 0 and <= period"));
        }
        if !(self.atoms >= 1.0) {
            return Err(Error::config("search.atoms", "must be >= 1"));
        }
        if !(self.detection_noise > 0.0) {
            return Err(Error::config("search.detection_noise", "must be > 0"));
        }
        if self.max_windows == 0 {
            return Err(Error::config("search.max_windows", "must be >= 1"));
        }
        Ok(())
    }

    /// Landau–Zener transfer for a sweep of `width` Hz over the interaction time.
    pub fn transfer_probability(&self, width: f64) -> f64 {
        let rate = 2.0 * PI * width / self.interaction_time;
        1.0 - (-PI * self.rabi_frequency * self.rabi_frequency / (2.0 * rate)).exp()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold_sigma * self.detection_noise
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub found: bool,
    /// Estimated line center, Hz.
    pub center: Option<f64>,
    /// Resolution of the final window, Hz.
    pub resolution: f64,
    pub sweeps: usize,
    /// s
    pub elapsed: f64,
}

struct Prober<'a> {
    cfg: &'a ChirpSearchConfig,
    true_line: f64,
    rng: &'a mut RngStream,
    sweeps: usize,
}

impl Prober<'_> {
    /// Measured excitation for one sweep across `[lo, hi]`.
    fn sweep(&mut self, lo: f64, hi: f64) -> f64 {
        self.sweeps += 1;
        let p = if (lo..=hi).contains(&self.true_line) {
            self.cfg.transfer_probability(hi - lo)
        } else {
            0.0
        };
        let n = self.cfg.atoms.round() as u64;
        self.rng.projection_fraction(n, p) + self.rng.normal(self.cfg.detection_noise)
    }
}

/// Searches for a line at `true_line` starting from `guess`. A line outside
/// every visited window returns `found = false`.
pub fn chirp_search(true_line: f64, guess: f64, cfg: &ChirpSearchConfig, rng: &mut RngStream) -> Result<SearchOutcome> {
    cfg.validate()?;
    let threshold = cfg.threshold();
    let mut prober = Prober {
        cfg,
        true_line,
        rng,
        sweeps: 0,
    };
    let half = cfg.span / 2.0;
    let mut hit = None;
    for k in 0..cfg.max_windows {
        let order = k.div_ceil(2) as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let center = guess + sign * order * cfg.span;
        if prober.sweep(center - half, center + half) > threshold {
            hit = Some((center - half, center + half));
            break;
        }
    }
    let Some((mut lo, mut hi)) = hit else {
        return Ok(SearchOutcome {
            found: false,
            center: None,
            resolution: cfg.span,
            sweeps: prober.sweeps,
            elapsed: prober.sweeps as f64 * cfg.period,
        });
    };
    for _ in 0..cfg.refinements {
        let mid = 0.5 * (lo + hi);
        let lower = prober.sweep(lo, mid);
        let upper = prober.sweep(mid, hi);
        if lower >= upper {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SearchOutcome {
        found: true,
        center: Some(0.5 * (lo + hi)),
        resolution: hi - lo,
        sweeps: prober.sweeps,
        elapsed: prober.sweeps as f64 * cfg.period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cfg() -> ChirpSearchConfig {
        ChirpSearchConfig {
            span: 200e3,
            period: 2.0,
            interaction_time: 1.0,
            rabi_frequency: 1500.0,
            atoms: 1e5,
            detection_noise: 0.01,
            threshold_sigma: 5.0,
            max_windows: 5,
            refinements: 4,
        }
    }

    #[test]
    fn full_window_transfer_is_high() {
        let p = cfg().transfer_probability(200e3);
        assert!(p > 0.9, "{p}");
    }

    #[test]
    fn finds_nearby_line() {
        let mut rng = RngStream::new(3, 0);
        let out = chirp_search(1.234e6 + 80e3, 1.234e6, &cfg(), &mut rng).unwrap();
        assert!(out.found);
        assert!((out.center.unwrap() - (1.234e6 + 80e3)).abs() < 200e3 / 10.0);
    }

    #[test]
    fn misses_far_line() {
        let mut rng = RngStream::new(3, 0);
        let out = chirp_search(2e6, 0.0, &cfg(), &mut rng).unwrap();
        assert!(!out.found);
        assert_eq!(out.sweeps, 5);
        assert_eq!(out.elapsed, 10.0);
    }

    #[test]
    fn neighbouring_window_found() {
        let mut rng = RngStream::new(4, 0);
        let out = chirp_search(-250e3, 0.0, &cfg(), &mut rng).unwrap();
        assert!(out.found);
        assert!((out.center.unwrap() + 250e3).abs() < 20e3);
    }

    #[test]
    fn rejects_zero_span() {
        let mut c = cfg();
        c.span = 0.0;
        assert!(chirp_search(0.0, 0.0, &c, &mut RngStream::new(0, 0)).is_err());
    }
}
