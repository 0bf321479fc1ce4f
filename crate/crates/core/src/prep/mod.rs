//! Atom preparation chain: oven, Zeeman slower, two MOT stages, lattice
//! loading and hold.
//!
//! Stage outcomes are configured endpoint values (capture fraction, final
//! temperature, optional loss time) rather than solutions of cooling rate
//! equations. Atom numbers are real-valued means.

mod mot;
mod slower;
mod tof;
mod transfer;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};
use crate::species::SpeciesRecord;

pub use mot::{mot_enhancement, mot_load, MotSource};
pub use slower::{
    bias_field, doppler_field_span, max_deceleration, profile_rms_deviation, slower_capture_velocity,
    slower_field_profile, SlowerConfig,
};
pub use tof::{fit_temperature, free_fall_displacement, tof_expansion, TofFit};
pub use transfer::{
    ballistic_escape_time, lattice_survival, lattice_transfer_fraction, maxwell_boltzmann_energy_cdf,
    recapture_fraction, RECAPTURE_DETECTION_THRESHOLD,
};

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Oven,
    Slower,
    Mot1,
    Mot2Broadband,
    Mot2SingleFrequency,
    Lattice,
    Hold,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Oven => "oven",
            Stage::Slower => "slower",
            Stage::Mot1 => "mot1",
            Stage::Mot2Broadband => "mot2-broadband",
            Stage::Mot2SingleFrequency => "mot2-single-frequency",
            Stage::Lattice => "lattice",
            Stage::Hold => "hold",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleState {
    pub atom_number: f64,
    /// K
    pub temperature: f64,
    /// m
    pub rms_radius: f64,
    pub stage: Stage,
    #[serde(skip)]
    pub species: SpeciesRecord,
}

impl EnsembleState {
    pub fn new(
        species: SpeciesRecord,
        stage: Stage,
        atom_number: f64,
        temperature: f64,
        rms_radius: f64,
    ) -> Result<Self> {
        if !(atom_number >= 0.0) {
            return Err(Error::invalid("atom number must be >= 0"));
        }
        if !(temperature >= 0.0) {
            return Err(Error::invalid("temperature must be >= 0"));
        }
        Ok(EnsembleState {
            atom_number,
            temperature,
            rms_radius,
            stage,
            species,
        })
    }

    fn advance(&self, to: Stage) -> Result<Stage> {
        if to <= self.stage {
            return Err(Error::StageOrder {
                from: self.stage.to_string(),
                to: to.to_string(),
            });
        }
        Ok(to)
    }
}

/// Named scalar key for the broadband MOT frequency-modulation span, Hz.
pub const BROADENING_SPAN_KEY: &str = "broadening_span_hz";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub stage: Stage,
    /// s
    pub duration: f64,
    pub capture_fraction: f64,
    /// K; `None` leaves the temperature unchanged.
    #[serde(default)]
    pub final_temperature: Option<f64>,
    /// s; `None` means no loss during the stage.
    #[serde(default)]
    pub loss_time_constant: Option<f64>,
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

impl StageConfig {
    pub fn validate(&self) -> Result<()> {
        let path = format!("stages.{}", self.stage);
        if !(self.duration >= 0.0) {
            return Err(Error::config(format!("{path}.duration"), "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.capture_fraction) {
            return Err(Error::config(format!("{path}.capture_fraction"), "must lie in [0, 1]"));
        }
        if let Some(t) = self.final_temperature {
            if !(t >= 0.0) {
                return Err(Error::config(format!("{path}.final_temperature"), "must be >= 0"));
            }
        }
        if let Some(tau) = self.loss_time_constant {
            if !(tau > 0.0) {
                return Err(Error::config(format!("{path}.loss_time_constant"), "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Doppler FWHM of the second-stage cooling line at `temperature`, Hz.
pub fn doppler_fwhm(species: &SpeciesRecord, temperature: f64) -> f64 {
    (8.0 * std::f64::consts::LN_2 * BOLTZMANN * temperature / species.mass).sqrt() / species.cooling2.wavelength
}

/// Applies one stage: `N ← N·capture·e^(−duration/τ_loss)`, temperature set
/// to the configured endpoint, stage tag advanced.
pub fn run_stage(state: &EnsembleState, cfg: &StageConfig) -> Result<EnsembleState> {
    cfg.validate()?;
    let stage = state.advance(cfg.stage)?;
    if let Some(&span) = cfg.extra.get(BROADENING_SPAN_KEY) {
        let doppler = doppler_fwhm(&state.species, state.temperature);
        if span < doppler {
            return Err(Error::config(
                format!("stages.{}.extra.{BROADENING_SPAN_KEY}", cfg.stage),
                format!("{span:e} Hz does not cover the {doppler:e} Hz Doppler width of the input cloud"),
            ));
        }
    }
    let survival = match cfg.loss_time_constant {
        Some(tau) => (-cfg.duration / tau).exp(),
        None => 1.0,
    };
    Ok(EnsembleState {
        atom_number: state.atom_number * cfg.capture_fraction * survival,
        temperature: cfg.final_temperature.unwrap_or(state.temperature),
        rms_radius: state.rms_radius,
        stage,
        species: state.species.clone(),
    })
}

/// Transfers the cloud into a lattice of depth `depth` (K).
pub fn load_lattice(state: &EnsembleState, depth: f64, capture_efficiency: f64) -> Result<EnsembleState> {
    let stage = state.advance(Stage::Lattice)?;
    let fraction = lattice_transfer_fraction(state.temperature, depth, capture_efficiency)?;
    Ok(EnsembleState {
        atom_number: state.atom_number * fraction,
        stage,
        ..state.clone()
    })
}

/// Exponential decay of the trapped sample; temperature unchanged.
pub fn hold_in_lattice(state: &EnsembleState, t: f64, lifetime: f64) -> Result<EnsembleState> {
    if !matches!(state.stage, Stage::Lattice | Stage::Hold) {
        return Err(Error::StageOrder {
            from: state.stage.to_string(),
            to: Stage::Hold.to_string(),
        });
    }
    let survival = lattice_survival(t, lifetime)?;
    Ok(EnsembleState {
        atom_number: state.atom_number * survival,
        stage: Stage::Hold,
        ..state.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotLoadConfig {
    /// atoms/s before source enhancement
    pub rate: f64,
    /// s
    pub loss_time: f64,
    /// s; `None` loads to steady state.
    #[serde(default)]
    pub load_duration: Option<f64>,
    /// K
    pub temperature: f64,
    /// m
    pub rms_radius: f64,
    #[serde(default)]
    pub source: MotSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoldConfig {
    pub duration: f64,
    pub lifetime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub slower: Option<SlowerConfig>,
    pub mot: MotLoadConfig,
    pub stages: Vec<StageConfig>,
    /// Mode-matching efficiency multiplying the thermal transfer fraction.
    #[serde(default = "one")]
    pub lattice_capture_efficiency: f64,
    pub hold: Option<HoldConfig>,
}

fn under_pipeline(e: Error) -> Error {
    match e {
        Error::Config { path, message } => Error::config(format!("pipeline.{path}"), message),
        other => other,
    }
}

fn one() -> f64 {
    1.0
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.slower {
            s.validate().map_err(under_pipeline)?;
        }
        if !(self.mot.rate >= 0.0) {
            return Err(Error::config("pipeline.mot.rate", "must be >= 0"));
        }
        if !(self.mot.loss_time > 0.0) {
            return Err(Error::config("pipeline.mot.loss_time", "must be > 0"));
        }
        if !(self.mot.temperature >= 0.0) {
            return Err(Error::config("pipeline.mot.temperature", "must be >= 0"));
        }
        mot_enhancement(self.mot.source).map_err(|e| Error::config("pipeline.mot.source", e.to_string()))?;
        let mut last = Stage::Mot1;
        for s in &self.stages {
            s.validate().map_err(under_pipeline)?;
            if s.stage <= last || s.stage >= Stage::Lattice {
                return Err(Error::config(
                    format!("pipeline.stages.{}", s.stage),
                    format!("stage must follow {last} and precede the lattice"),
                ));
            }
            last = s.stage;
        }
        if !(0.0..=1.0).contains(&self.lattice_capture_efficiency) {
            return Err(Error::config(
                "pipeline.lattice_capture_efficiency",
                "must lie in [0, 1]",
            ));
        }
        if let Some(h) = &self.hold {
            if !(h.duration >= 0.0) || !(h.lifetime > 0.0) {
                return Err(Error::config("pipeline.hold", "duration must be >= 0 and lifetime > 0"));
            }
        }
        Ok(())
    }

    /// Total preparation time (MOT load excluded when loading to steady state).
    pub fn duration(&self) -> f64 {
        self.mot.load_duration.unwrap_or(0.0) + self.stages.iter().map(|s| s.duration).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRow {
    pub stage: Stage,
    pub duration: f64,
    pub atom_number: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub capture_velocity: Option<f64>,
    pub lattice_depth: f64,
    pub transfer_fraction: f64,
    pub rows: Vec<StageRow>,
    pub final_state: EnsembleState,
}

/// Runs the full chain from MOT loading through lattice hold.
pub fn run_pipeline(species: &SpeciesRecord, cfg: &PipelineConfig, lattice_depth: f64) -> Result<PipelineReport> {
    cfg.validate()?;
    let capture_velocity = cfg
        .slower
        .as_ref()
        .map(|s| slower_capture_velocity(species, s))
        .transpose()?;
    let rate = cfg.mot.rate * mot_enhancement(cfg.mot.source)?;
    let load_t = cfg.mot.load_duration.unwrap_or(f64::INFINITY);
    let n0 = mot_load(rate, cfg.mot.loss_time, load_t)?;
    let mut state = EnsembleState::new(
        species.clone(),
        Stage::Mot1,
        n0,
        cfg.mot.temperature,
        cfg.mot.rms_radius,
    )?;
    let mut rows = vec![StageRow {
        stage: Stage::Mot1,
        duration: cfg.mot.load_duration.unwrap_or(0.0),
        atom_number: state.atom_number,
        temperature: state.temperature,
    }];
    for stage in &cfg.stages {
        state = run_stage(&state, stage)?;
        rows.push(StageRow {
            stage: stage.stage,
            duration: stage.duration,
            atom_number: state.atom_number,
            temperature: state.temperature,
        });
    }
    let transfer_fraction =
        lattice_transfer_fraction(state.temperature, lattice_depth, cfg.lattice_capture_efficiency)?;
    state = load_lattice(&state, lattice_depth, cfg.lattice_capture_efficiency)?;
    rows.push(StageRow {
        stage: Stage::Lattice,
        duration: 0.0,
        atom_number: state.atom_number,
        temperature: state.temperature,
    });
    if let Some(h) = &cfg.hold {
        state = hold_in_lattice(&state, h.duration, h.lifetime)?;
        rows.push(StageRow {
            stage: Stage::Hold,
            duration: h.duration,
            atom_number: state.atom_number,
            temperature: state.temperature,
        });
    }
    Ok(PipelineReport {
        capture_velocity,
        lattice_depth,
        transfer_fraction,
        rows,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::{species, Isotope};

    fn mot1() -> EnsembleState {
        EnsembleState::new(species(Isotope::Sr88), Stage::Mot1, 1e8, 2e-3, 1e-3).unwrap()
    }

    fn broadband() -> StageConfig {
        StageConfig {
            stage: Stage::Mot2Broadband,
            duration: 0.12,
            capture_fraction: 0.1,
            final_temperature: Some(22e-6),
            loss_time_constant: None,
            extra: [(BROADENING_SPAN_KEY.to_string(), 5e6)].into_iter().collect(),
        }
    }

    fn single() -> StageConfig {
        StageConfig {
            stage: Stage::Mot2SingleFrequency,
            duration: 0.03,
            capture_fraction: 0.1,
            final_temperature: Some(2e-6),
            loss_time_constant: None,
            extra: BTreeMap::new(),
        }
    }

    #[test]
    fn sr_chain() {
        let s1 = run_stage(&mot1(), &broadband()).unwrap();
        assert_eq!(s1.atom_number, 1e7);
        assert_eq!(s1.temperature, 22e-6);
        let s2 = run_stage(&s1, &single()).unwrap();
        assert_eq!(s2.atom_number, 1e6);
        assert_eq!(s2.temperature, 2e-6);
        let s3 = load_lattice(&s2, 5e-6, 1.0).unwrap();
        assert!((s3.atom_number - 4.5619e5).abs() < 10.0);
    }

    #[test]
    fn identity_stage() {
        let cfg = StageConfig {
            capture_fraction: 1.0,
            duration: 0.0,
            final_temperature: None,
            loss_time_constant: Some(1.0),
            extra: BTreeMap::new(),
            ..single()
        };
        let out = run_stage(&mot1(), &cfg).unwrap();
        assert_eq!(out.atom_number, 1e8);
        assert_eq!(out.temperature, 2e-3);
        assert_eq!(out.stage, Stage::Mot2SingleFrequency);
    }

    #[test]
    fn out_of_order_rejected() {
        let s2 = run_stage(&run_stage(&mot1(), &broadband()).unwrap(), &single()).unwrap();
        assert!(matches!(run_stage(&s2, &broadband()), Err(Error::StageOrder { .. })));
        assert!(matches!(hold_in_lattice(&s2, 1.0, 1.0), Err(Error::StageOrder { .. })));
    }

    #[test]
    fn broadening_must_cover_doppler_width() {
        // 2 mK at 689 nm is about 1.5 MHz FWHM.
        let d = doppler_fwhm(&species(Isotope::Sr88), 2e-3);
        assert!((d - 1.49e6).abs() < 0.05e6, "{d}");
        let mut cfg = broadband();
        cfg.extra.insert(BROADENING_SPAN_KEY.into(), 1e6);
        assert!(matches!(run_stage(&mot1(), &cfg), Err(Error::Config { .. })));
    }

    #[test]
    fn loss_during_stage() {
        let mut cfg = single();
        cfg.loss_time_constant = Some(0.03);
        let out = run_stage(&mot1(), &cfg).unwrap();
        assert!((out.atom_number - 1e7 * (-1.0f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn hold_keeps_temperature() {
        let s = load_lattice(
            &run_stage(&run_stage(&mot1(), &broadband()).unwrap(), &single()).unwrap(),
            5e-6,
            1.0,
        )
        .unwrap();
        let h = hold_in_lattice(&s, 0.0, 1.4).unwrap();
        assert_eq!(h.atom_number, s.atom_number);
        let h = hold_in_lattice(&s, 1.4, 1.4).unwrap();
        assert_eq!(h.temperature, s.temperature);
        assert!(hold_in_lattice(&s, 1.0, 0.0).is_err());
    }

    #[test]
    fn invalid_capture_fraction() {
        let mut cfg = single();
        cfg.capture_fraction = 1.2;
        assert!(run_stage(&mot1(), &cfg).is_err());
    }
}
