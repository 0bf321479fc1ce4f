//! Scenario files: one TOML document holding any number of `[[scenario]]`
//! tables. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    derive_trap, required_power, LatticeConfig, LatticeGeometry, TrapDerived, DEFAULT_DEPTH_COEFFICIENT,
    DEFAULT_LIGHT_SHIFT_SLOPE,
};
use crate::noise::NoiseSpec;
use crate::prep::PipelineConfig;
use crate::servo::ServoConfig;
use crate::species::{species, Isotope, SpeciesOverride, SpeciesRecord};
use crate::spectroscopy::{induced_rabi_frequency, pi_pulse_coupling, ChirpSearchConfig, ProbeConfig};
use crate::systematics::BbrModel;

/// The scenarios shipped with the crate.
pub const SHIPPED_SCENARIOS: &str = include_str!("../scenarios/breadboards.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: Vec<ScenarioSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub species: Isotope,
    pub seed: u64,
    #[serde(default)]
    pub species_overrides: SpeciesOverride,
    pub pipeline: PipelineConfig,
    pub lattice: ScenarioLattice,
    pub probe: ScenarioProbe,
    pub search: ScenarioSearch,
    pub noise: NoiseSpec,
    pub lock: ScenarioLock,
    pub servo: ServoConfig,
    pub systematics: ScenarioSystematics,
    pub recapture: Option<ScenarioRecapture>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioLattice {
    pub input_power: f64,
    pub waist: f64,
    pub wavelength: f64,
    /// When omitted, derived from `depth_target`, else 1.
    pub enhancement_factor: Option<f64>,
    /// K
    pub depth_target: Option<f64>,
    #[serde(default)]
    pub geometry: LatticeGeometry,
    pub depth_coefficient: Option<f64>,
    #[serde(default = "default_slope")]
    pub light_shift_slope: f64,
    /// Bound on the lattice frequency excursion from magic, Hz.
    #[serde(default = "default_lattice_stability")]
    pub frequency_stability: f64,
}

fn default_slope() -> f64 {
    DEFAULT_LIGHT_SHIFT_SLOPE
}

fn default_lattice_stability() -> f64 {
    10e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioProbe {
    pub pulse_time: f64,
    #[serde(default)]
    pub magnetic_field: f64,
    #[serde(default)]
    pub probe_intensity: f64,
    /// Induced coupling ξ; `None` calibrates a π pulse.
    pub coupling: Option<f64>,
    /// Direct Rabi frequency (rad/s) for species without induced coupling.
    pub rabi_frequency: Option<f64>,
    /// Lorentzian carrier broadening FWHM, Hz.
    #[serde(default)]
    pub broadening: f64,
    pub scan_span: f64,
    pub scan_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSearch {
    /// Offset of the true line from the laser's initial guess, Hz.
    pub line_offset: f64,
    pub chirp: ChirpSearchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioLock {
    /// Number of servo cycles simulated.
    pub cycles: usize,
    /// Atomic line offset from the LO nominal frequency, Hz.
    #[serde(default)]
    pub line_center: f64,
    /// Carrier broadening during locked operation, Hz. Zero locks to the
    /// Fourier-limited line.
    #[serde(default)]
    pub broadening: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSystematics {
    pub bbr: BbrModel,
    /// K
    pub environment_temperature: f64,
    /// K
    pub temperature_uncertainty: f64,
    /// Quadratic Zeeman coefficient, Hz/T².
    pub zeeman_beta: f64,
    /// Bias field during interrogation, T. Defaults to the probe field.
    pub bias_field: Option<f64>,
    pub field_uncertainty_fraction: f64,
    /// Collisional shift coefficient, Hz·m³.
    pub density_coefficient: f64,
    pub density_uncertainty_fraction: f64,
    pub occupied_sites: f64,
    /// Where the coefficients come from.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRecapture {
    /// m
    pub capture_radius: f64,
    pub lattice_off_hold: f64,
    pub lattice_on_hold: f64,
}

/// A validated scenario with derived quantities resolved.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub species: SpeciesRecord,
    pub lattice: LatticeConfig,
    pub trap: TrapDerived,
    pub probe: ProbeConfig,
    /// Set when the probe cannot drive the transition (bosons at zero field).
    pub probe_diagnostic: Option<String>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    pub fn nu0(&self) -> f64 {
        self.species.clock_frequency
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.spec.seed = seed;
        self
    }
}

/// Parses a scenario file in strict mode.
pub fn parse_scenarios(text: &str) -> Result<ScenarioFile> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut seen = BTreeSet::new();
    for s in &file.scenario {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::config(
                format!("scenario.{}", s.name),
                "scenario name appears more than once",
            ));
        }
    }
    Ok(file)
}

/// Loads scenario `name` from `path`, or from the shipped file when `path`
/// is `None`.
pub fn load_scenario(path: Option<&Path>, name: &str) -> Result<Scenario> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => SHIPPED_SCENARIOS.to_string(),
    };
    let file = parse_scenarios(&text)?;
    let spec = file
        .scenario
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    resolve(spec)
}

fn prefixed<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { path, message } => Error::config(format!("scenario.{name}.{path}"), message),
        other => Error::config(format!("scenario.{name}"), other.to_string()),
    })
}

/// Validates a scenario and resolves derived settings.
pub fn resolve(spec: ScenarioSpec) -> Result<Scenario> {
    let name = spec.name.clone();
    prefixed(&name, resolve_inner(spec))
}

fn resolve_inner(spec: ScenarioSpec) -> Result<Scenario> {
    let species = spec.species_overrides.apply(species(spec.species))?;
    spec.pipeline.validate()?;
    spec.noise.validate()?;
    spec.servo.validate()?;
    spec.search.chirp.validate()?;
    spec.systematics.bbr.validate()?;

    let lattice = resolve_lattice(&spec.lattice)?;
    let trap = derive_trap(&lattice, &species)?;
    if !(spec.lattice.frequency_stability >= 0.0) {
        return Err(Error::config("lattice.frequency_stability", "must be >= 0"));
    }

    let p = &spec.probe;
    if !(p.pulse_time > 0.0) {
        return Err(Error::config("probe.pulse_time", "must be > 0"));
    }
    if !(p.broadening >= 0.0) {
        return Err(Error::config("probe.broadening", "must be >= 0"));
    }
    if !(p.scan_span > 0.0) || p.scan_points < 2 {
        return Err(Error::config(
            "probe.scan_span",
            "span must be > 0 with at least 2 points",
        ));
    }
    let (rabi_frequency, probe_diagnostic) = match (p.rabi_frequency, p.coupling) {
        (Some(r), None) => (r, None),
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "probe",
                "give either rabi_frequency or coupling, not both",
            ));
        }
        (None, coupling) => {
            let xi = match coupling {
                Some(xi) => xi,
                None => pi_pulse_coupling(p.magnetic_field, p.probe_intensity, p.pulse_time)
                    .map_err(|e| Error::config("probe.coupling", e.to_string()))?,
            };
            let induced = induced_rabi_frequency(p.magnetic_field, p.probe_intensity, xi)?;
            let diag = induced
                .forbidden
                .then(|| "forbidden transition closed: no mixing field applied".to_string());
            (induced.rabi_frequency, diag)
        }
    };
    let probe = ProbeConfig {
        rabi_frequency,
        pulse_time: p.pulse_time,
        detuning: 0.0,
        magnetic_field: p.magnetic_field,
        probe_intensity: p.probe_intensity,
    };
    probe.validate()?;
    if (spec.servo.probe_time - p.pulse_time).abs() > 1e-12 {
        return Err(Error::config("servo.probe_time", "must equal probe.pulse_time"));
    }
    if !(spec.lock.broadening >= 0.0) {
        return Err(Error::config("lock.broadening", "must be >= 0"));
    }
    if spec.lock.cycles < 4 {
        return Err(Error::config("lock.cycles", "must be >= 4"));
    }
    let sys = &spec.systematics;
    for (field, v) in [
        ("systematics.environment_temperature", sys.environment_temperature),
        ("systematics.occupied_sites", sys.occupied_sites),
    ] {
        if !(v > 0.0) {
            return Err(Error::config(field, "must be > 0"));
        }
    }
    for (field, v) in [
        ("systematics.temperature_uncertainty", sys.temperature_uncertainty),
        ("systematics.field_uncertainty_fraction", sys.field_uncertainty_fraction),
        (
            "systematics.density_uncertainty_fraction",
            sys.density_uncertainty_fraction,
        ),
    ] {
        if !(v >= 0.0) {
            return Err(Error::config(field, "must be >= 0"));
        }
    }
    if let Some(r) = &spec.recapture {
        if !(r.capture_radius > 0.0 && r.lattice_off_hold >= 0.0 && r.lattice_on_hold >= 0.0) {
            return Err(Error::config("recapture", "radius must be > 0 and holds >= 0"));
        }
    }
    Ok(Scenario {
        species,
        lattice,
        trap,
        probe,
        probe_diagnostic,
        spec,
    })
}

fn resolve_lattice(l: &ScenarioLattice) -> Result<LatticeConfig> {
    let coefficient = l.depth_coefficient.unwrap_or(DEFAULT_DEPTH_COEFFICIENT);
    let enhancement_factor = match (l.enhancement_factor, l.depth_target) {
        (Some(e), _) => e,
        (None, Some(target)) => {
            if !(l.input_power > 0.0) {
                return Err(Error::config(
                    "lattice.input_power",
                    "must be > 0 to reach depth_target",
                ));
            }
            let needed = required_power(target, l.waist, coefficient)?;
            let e = needed / l.input_power;
            if e < 1.0 {
                return Err(Error::config(
                    "lattice.depth_target",
                    format!("input power already exceeds the {needed:e} W needed"),
                ));
            }
            e
        }
        (None, None) => 1.0,
    };
    let cfg = LatticeConfig {
        input_power: l.input_power,
        waist: l.waist,
        wavelength: l.wavelength,
        enhancement_factor,
        geometry: l.geometry,
        depth_coefficient: l.depth_coefficient,
    };
    cfg.validate()?;
    Ok(cfg)
}
