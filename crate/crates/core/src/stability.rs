//! Frequency-stability analysis: overlapping Allan deviation, power-law fits,
//! drift estimation and two-clock comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::noise::FrequencyTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCurve {
    pub taus: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub counts: Vec<usize>,
}

impl StabilityCurve {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Deviation at the tau closest to `tau` (log distance).
    pub fn at(&self, tau: f64) -> Option<f64> {
        self.taus
            .iter()
            .zip(&self.sigmas)
            .min_by(|a, b| (a.0 / tau).ln().abs().total_cmp(&(b.0 / tau).ln().abs()))
            .map(|(_, s)| *s)
    }

    pub fn scaled(&self, factor: f64) -> StabilityCurve {
        StabilityCurve {
            taus: self.taus.clone(),
            sigmas: self.sigmas.iter().map(|s| s * factor).collect(),
            counts: self.counts.clone(),
        }
    }
}

/// Averaging-time grid.
#[derive(Debug, Clone, PartialEq)]
pub enum TauGrid {
    /// `dt·2^k` up to a quarter of the record.
    Octave,
    Explicit(Vec<f64>),
}

impl std::str::FromStr for TauGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("octave") {
            return Ok(TauGrid::Octave);
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad tau `{t}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(TauGrid::Explicit)
    }
}

impl TauGrid {
    pub fn resolve(&self, dt: f64, n: usize) -> Vec<f64> {
        match self {
            TauGrid::Octave => octave_taus(dt, n),
            TauGrid::Explicit(t) => t.clone(),
        }
    }
}

pub fn octave_taus(dt: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = 1usize;
    while m <= n / 4 {
        out.push(m as f64 * dt);
        m *= 2;
    }
    out
}

fn averaging_factor(tau: f64, dt: f64) -> Result<usize> {
    let m = (tau / dt).round();
    if !(m >= 1.0) || ((m * dt - tau).abs() > 1e-9 * tau.abs().max(dt)) {
        return Err(Error::invalid(format!(
            "tau {tau:e} s is not an integer multiple of dt {dt:e} s"
        )));
    }
    Ok(m as usize)
}

/// Overlapping Allan variance at averaging factor `m` over frequency samples:
/// `σ² = Σ (ȳ_{i+m} − ȳ_i)² / (2·(N − 2m + 1))`, summed over every start `i`.
/// Returns `(σ², term count)`.
pub fn overlapping_avar(y: &[f64], m: usize) -> Option<(f64, usize)> {
    let n = y.len();
    if m == 0 || n < 2 * m {
        return None;
    }
    let terms = n - 2 * m + 1;
    // d_j = y_{j+m} − y_j; ȳ_{i+m} − ȳ_i = (1/m)·Σ_{j=i}^{i+m−1} d_j.
    // The window sum slides over d directly so large common offsets in y
    // never enter the differences.
    let d = |j: usize| y[j + m] - y[j];
    let mut window: f64 = (0..m).map(d).sum();
    let mut acc = window * window;
    for i in 1..terms {
        window += d(i + m - 1) - d(i - 1);
        acc += window * window;
    }
    let mf = m as f64;
    Some((acc / (mf * mf) / (2.0 * terms as f64), terms))
}

/// Overlapping Allan deviation of `trace` at each tau. Taus that do not
/// leave at least three non-overlapping segments are rejected.
pub fn overlapping_allan(trace: &FrequencyTrace, taus: &[f64]) -> Result<StabilityCurve> {
    let n = trace.len();
    let mut curve = StabilityCurve {
        taus: Vec::with_capacity(taus.len()),
        sigmas: Vec::with_capacity(taus.len()),
        counts: Vec::with_capacity(taus.len()),
    };
    let mut last = 0.0;
    for &tau in taus {
        let m = averaging_factor(tau, trace.dt)?;
        if n / m < 3 {
            return Err(Error::invalid(format!(
                "tau {tau:e} s leaves fewer than 3 segments in a {n}-sample trace"
            )));
        }
        if tau <= last {
            return Err(Error::invalid("taus must be strictly increasing"));
        }
        last = tau;
        let (var, count) = overlapping_avar(&trace.samples, m).expect("length checked");
        curve.taus.push(m as f64 * trace.dt);
        curve.sigmas.push(var.sqrt());
        curve.counts.push(count);
    }
    Ok(curve)
}

/// Power law `σ(τ) = amplitude·τ^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    /// Deviation at τ = 1 s.
    pub amplitude: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn eval(&self, tau: f64) -> f64 {
        self.amplitude * tau.powf(self.exponent)
    }
}

/// Log-log least-squares fit over taus in `[tau_min, tau_max]`.
pub fn fit_powerlaw(curve: &StabilityCurve, tau_min: f64, tau_max: f64) -> Result<PowerLaw> {
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for (&t, &s) in curve.taus.iter().zip(&curve.sigmas) {
        if t < tau_min || t > tau_max {
            continue;
        }
        if !(s > 0.0) {
            return Err(Error::invalid(format!("non-positive deviation at tau {t:e}")));
        }
        lx.push(t.ln());
        ly.push(s.ln());
    }
    if lx.len() < 3 {
        return Err(Error::invalid("power-law fit needs at least 3 points in range"));
    }
    let line = fit_line(&lx, &ly)?;
    Ok(PowerLaw {
        amplitude: line.intercept.exp(),
        exponent: line.slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    /// fractional frequency per second
    pub drift: f64,
    pub stderr: f64,
}

/// Least-squares slope of `y` against time.
pub fn estimate_drift(trace: &FrequencyTrace) -> Result<DriftEstimate> {
    if trace.len() < 2 {
        return Err(Error::invalid("drift estimate needs at least 2 samples"));
    }
    let t: Vec<f64> = trace.times().collect();
    let LineFit {
        slope, slope_stderr, ..
    } = fit_line(&t, &trace.samples)?;
    Ok(DriftEstimate {
        drift: slope,
        stderr: slope_stderr,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub difference: FrequencyTrace,
    pub curve: StabilityCurve,
    /// `curve/√2`, the per-clock instability for two identical clocks.
    pub per_clock: StabilityCurve,
}

/// Difference `a − b` (truncated to the shorter trace) and its stability.
pub fn compare_clocks(a: &FrequencyTrace, b: &FrequencyTrace, taus: &TauGrid) -> Result<Comparison> {
    if (a.dt - b.dt).abs() > 1e-12 * a.dt.max(b.dt) {
        return Err(Error::invalid(format!(
            "sample intervals differ: {:e} s vs {:e} s",
            a.dt, b.dt
        )));
    }
    let n = a.len().min(b.len());
    let samples: Vec<f64> = a.samples[..n].iter().zip(&b.samples[..n]).map(|(x, y)| x - y).collect();
    let difference = FrequencyTrace {
        samples,
        dt: a.dt,
        seed: None,
        stream_id: None,
        label: format!("{} - {}", a.label, b.label),
    };
    let curve = overlapping_allan(&difference, &taus.resolve(a.dt, n))?;
    let per_clock = curve.scaled(std::f64::consts::FRAC_1_SQRT_2);
    Ok(Comparison {
        difference,
        curve,
        per_clock,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(samples: Vec<f64>, dt: f64) -> FrequencyTrace {
        FrequencyTrace::new(samples, dt, "t").unwrap()
    }

    #[test]
    fn constant_trace_has_zero_deviation() {
        let t = trace(vec![3.0e-13; 256], 1.0);
        let c = overlapping_allan(&t, &octave_taus(1.0, 256)).unwrap();
        assert!(c.sigmas.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn drift_identity() {
        let d = 2.5e-17;
        let t = trace((0..4096).map(|i| d * i as f64 * 0.5).collect(), 0.5);
        let c = overlapping_allan(&t, &octave_taus(0.5, 4096)).unwrap();
        for (tau, s) in c.taus.iter().zip(&c.sigmas) {
            let expect = d * tau / 2f64.sqrt();
            assert!((s - expect).abs() / expect < 1e-9, "tau {tau}: {s} vs {expect}");
        }
    }

    #[test]
    fn counts_and_rejections() {
        let t = trace(vec![0.0; 30], 1.0);
        let c = overlapping_allan(&t, &[1.0, 2.0]).unwrap();
        assert_eq!(c.counts, vec![29, 27]);
        assert!(overlapping_allan(&t, &[11.0]).is_err());
        assert!(overlapping_allan(&t, &[1.5]).is_err());
        assert!(overlapping_allan(&t, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn scale_equivariance() {
        let y: Vec<f64> = (0..512).map(|i| ((i * 7919) % 113) as f64 * 1e-16).collect();
        let a = overlapping_allan(&trace(y.clone(), 1.0), &[1.0, 4.0, 16.0]).unwrap();
        let b = overlapping_allan(&trace(y.iter().map(|v| -3.0 * v).collect(), 1.0), &[1.0, 4.0, 16.0]).unwrap();
        for (x, z) in a.sigmas.iter().zip(&b.sigmas) {
            assert!((z - 3.0 * x).abs() <= 1e-12 * z);
        }
    }

    #[test]
    fn exact_powerlaw_fit() {
        let taus: Vec<f64> = (0..8).map(|k| 2f64.powi(k)).collect();
        let curve = StabilityCurve {
            sigmas: taus.iter().map(|t| 3e-15 * t.powf(-0.5)).collect(),
            counts: vec![1; taus.len()],
            taus,
        };
        let p = fit_powerlaw(&curve, 1.0, 1e3).unwrap();
        assert!((p.amplitude - 3e-15).abs() / 3e-15 < 1e-6);
        assert!((p.exponent + 0.5).abs() < 1e-6);
        assert!(fit_powerlaw(&curve, 1.0, 3.0).is_err());
    }

    #[test]
    fn drift_slope_exact() {
        let t = trace((0..1000).map(|i| 1e-14 + 4e-18 * i as f64 * 2.0).collect(), 2.0);
        let d = estimate_drift(&t).unwrap();
        assert!((d.drift - 4e-18).abs() / 4e-18 < 1e-9);
    }

    #[test]
    fn compare_identical_is_zero_and_dt_checked() {
        let a = trace((0..64).map(|i| i as f64 * 1e-16).collect(), 1.0);
        let c = compare_clocks(&a, &a, &TauGrid::Octave).unwrap();
        assert!(c.curve.sigmas.iter().all(|&s| s == 0.0));
        let b = trace(a.samples.clone(), 2.0);
        assert!(compare_clocks(&a, &b, &TauGrid::Octave).is_err());
    }

    #[test]
    fn tau_grid_parse() {
        assert_eq!("octave".parse::<TauGrid>().unwrap(), TauGrid::Octave);
        assert_eq!(
            "1, 2,4".parse::<TauGrid>().unwrap(),
            TauGrid::Explicit(vec![1.0, 2.0, 4.0])
        );
        assert!("1,x".parse::<TauGrid>().is_err());
    }
}
