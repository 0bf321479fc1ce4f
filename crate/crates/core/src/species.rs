//! Atomic species and transition catalog for the Sr and Yb lattice clocks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS_UNIT, PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Isotope {
    Sr88,
    Sr87,
    Yb171,
    Yb174,
}

impl Isotope {
    pub const ALL: [Isotope; 4] = [Isotope::Sr88, Isotope::Sr87, Isotope::Yb171, Isotope::Yb174];

    pub fn is_strontium(self) -> bool {
        matches!(self, Isotope::Sr88 | Isotope::Sr87)
    }
}

impl fmt::Display for Isotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Isotope::Sr88 => "Sr88",
            Isotope::Sr87 => "Sr87",
            Isotope::Yb171 => "Yb171",
            Isotope::Yb174 => "Yb174",
        };
        f.write_str(s)
    }
}

impl FromStr for Isotope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Isotope::ALL
            .into_iter()
            .find(|i| i.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown species `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionKind {
    DipoleAllowed,
    Intercombination,
    Clock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Natural linewidth Γ/2π, Hz.
    pub natural_linewidth: f64,
    pub kind: TransitionKind,
}

impl TransitionRecord {
    pub fn new(wavelength: f64, natural_linewidth: f64, kind: TransitionKind) -> Self {
        let natural_linewidth = match kind {
            TransitionKind::Clock => 0.0,
            _ => natural_linewidth,
        };
        TransitionRecord {
            wavelength,
            natural_linewidth,
            kind,
        }
    }

    /// Decay rate Γ in rad/s.
    pub fn gamma(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.natural_linewidth
    }

    /// Two-level saturation intensity `π·h·c·Γ / (3·λ³)`, W/m².
    pub fn saturation_intensity(&self) -> f64 {
        std::f64::consts::PI * PLANCK * SPEED_OF_LIGHT * self.gamma() / (3.0 * self.wavelength.powi(3))
    }

    /// Wavenumber 2π/λ, rad/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesRecord {
    pub name: Isotope,
    /// kg
    pub mass: f64,
    pub clock_wavelength: f64,
    pub clock_frequency: f64,
    pub cooling1: TransitionRecord,
    pub cooling2: TransitionRecord,
    pub lattice_magic_wavelength: f64,
    pub repump_wavelengths: Vec<f64>,
}

/// Tolerance on `clock_frequency` against `c / clock_wavelength`.
pub const CLOCK_FREQUENCY_TOLERANCE: f64 = 5e-3;

impl SpeciesRecord {
    fn build(
        name: Isotope,
        mass_u: f64,
        clock_wavelength: f64,
        cooling1: TransitionRecord,
        cooling2: TransitionRecord,
        lattice_magic_wavelength: f64,
        repump_wavelengths: Vec<f64>,
    ) -> Self {
        SpeciesRecord {
            name,
            mass: mass_u * ATOMIC_MASS_UNIT,
            clock_wavelength,
            clock_frequency: SPEED_OF_LIGHT / clock_wavelength,
            cooling1,
            cooling2,
            lattice_magic_wavelength,
            repump_wavelengths,
        }
    }

    pub fn clock_transition(&self) -> TransitionRecord {
        TransitionRecord::new(self.clock_wavelength, 0.0, TransitionKind::Clock)
    }

    /// Installs an exact clock frequency in place of `c/λ`.
    pub fn with_clock_frequency(mut self, frequency: f64) -> Result<Self> {
        self.clock_frequency = frequency;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("clock_wavelength", self.clock_wavelength),
            ("clock_frequency", self.clock_frequency),
            ("cooling1.wavelength", self.cooling1.wavelength),
            ("cooling2.wavelength", self.cooling2.wavelength),
            ("lattice_magic_wavelength", self.lattice_magic_wavelength),
        ];
        for (field, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::config(
                    format!("species.{field}"),
                    format!("must be positive and finite, got {value:e}"),
                ));
            }
        }
        if let Some(w) = self.repump_wavelengths.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::config(
                "species.repump_wavelengths",
                format!("must be positive, got {w:e}"),
            ));
        }
        for (field, t) in [("cooling1", &self.cooling1), ("cooling2", &self.cooling2)] {
            if !(t.natural_linewidth >= 0.0) {
                return Err(Error::config(
                    format!("species.{field}.natural_linewidth"),
                    "must be non-negative",
                ));
            }
        }
        let nominal = SPEED_OF_LIGHT / self.clock_wavelength;
        let rel = (self.clock_frequency - nominal).abs() / nominal;
        if rel > CLOCK_FREQUENCY_TOLERANCE {
            return Err(Error::config(
                "species.clock_frequency",
                format!(
                    "{:e} Hz deviates from c/λ = {nominal:e} Hz by {rel:.2e} (limit {CLOCK_FREQUENCY_TOLERANCE:e})",
                    self.clock_frequency
                ),
            ));
        }
        Ok(())
    }
}

fn strontium(name: Isotope, mass_u: f64) -> SpeciesRecord {
    SpeciesRecord::build(
        name,
        mass_u,
        698e-9,
        TransitionRecord::new(461e-9, 32e6, TransitionKind::DipoleAllowed),
        TransitionRecord::new(689e-9, 7.4e3, TransitionKind::Intercombination),
        813e-9,
        vec![707e-9, 679e-9],
    )
}

fn ytterbium(name: Isotope, mass_u: f64) -> SpeciesRecord {
    SpeciesRecord::build(
        name,
        mass_u,
        578e-9,
        TransitionRecord::new(399e-9, 29e6, TransitionKind::DipoleAllowed),
        TransitionRecord::new(556e-9, 182e3, TransitionKind::Intercombination),
        759e-9,
        vec![1389e-9],
    )
}

/// The built-in species catalog. Clock frequencies default to `c/λ`.
pub fn species_catalog() -> Vec<SpeciesRecord> {
    vec![
        strontium(Isotope::Sr88, 87.905_612_5),
        strontium(Isotope::Sr87, 86.908_877_5),
        ytterbium(Isotope::Yb171, 170.936_331_5),
        ytterbium(Isotope::Yb174, 173.938_866_4),
    ]
}

pub fn species(name: Isotope) -> SpeciesRecord {
    species_catalog()
        .into_iter()
        .find(|s| s.name == name)
        .expect("catalog covers every isotope")
}

/// Optional per-field overrides applied on top of a catalog entry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesOverride {
    pub mass: Option<f64>,
    pub clock_wavelength: Option<f64>,
    pub clock_frequency: Option<f64>,
    pub cooling1_linewidth: Option<f64>,
    pub cooling2_linewidth: Option<f64>,
    pub lattice_magic_wavelength: Option<f64>,
}

impl SpeciesOverride {
    pub fn apply(&self, mut record: SpeciesRecord) -> Result<SpeciesRecord> {
        if let Some(m) = self.mass {
            record.mass = m;
        }
        if let Some(w) = self.clock_wavelength {
            record.clock_wavelength = w;
            record.clock_frequency = SPEED_OF_LIGHT / w;
        }
        if let Some(f) = self.clock_frequency {
            record.clock_frequency = f;
        }
        if let Some(g) = self.cooling1_linewidth {
            record.cooling1.natural_linewidth = g;
        }
        if let Some(g) = self.cooling2_linewidth {
            record.cooling2.natural_linewidth = g;
        }
        if let Some(w) = self.lattice_magic_wavelength {
            record.lattice_magic_wavelength = w;
        }
        record.validate()?;
        Ok(record)
    }
}

/// The catalog as TOML text, suitable as a starting point for overrides.
pub fn catalog_to_toml() -> String {
    #[derive(Serialize)]
    struct Catalog {
        species: Vec<SpeciesRecord>,
    }
    toml::to_string(&Catalog {
        species: species_catalog(),
    })
    .expect("catalog serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nm(x: f64) -> f64 {
        x * 1e9
    }

    #[test]
    fn catalog_has_four_valid_entries() {
        let cat = species_catalog();
        assert!(cat.len() >= 4);
        for s in &cat {
            s.validate().unwrap();
        }
        assert_eq!(cat, species_catalog());
    }

    #[test]
    fn strontium_wavelengths() {
        let sr = species(Isotope::Sr88);
        assert!((nm(sr.lattice_magic_wavelength) - 813.0).abs() < 1.0);
        assert!((nm(sr.cooling1.wavelength) - 461.0).abs() < 1.0);
        assert!((nm(sr.cooling2.wavelength) - 689.0).abs() < 1.0);
        assert!((nm(sr.clock_wavelength) - 698.0).abs() < 1.0);
    }

    #[test]
    fn ytterbium_wavelengths() {
        let yb = species(Isotope::Yb174);
        assert!((nm(yb.lattice_magic_wavelength) - 759.0).abs() < 1.0);
        assert!((nm(yb.cooling1.wavelength) - 399.0).abs() < 1.0);
        assert!((nm(yb.cooling2.wavelength) - 556.0).abs() < 1.0);
        assert!((nm(yb.clock_wavelength) - 578.0).abs() < 1.0);
        assert!((nm(yb.repump_wavelengths[0]) - 1389.0).abs() < 1.0);
    }

    #[test]
    fn sr_clock_frequency_near_c_over_lambda() {
        let f = species(Isotope::Sr88).clock_frequency;
        assert!((f - 4.295e14).abs() / 4.295e14 < 5e-3);
    }

    #[test]
    fn clock_linewidth_is_zero() {
        let t = TransitionRecord::new(698e-9, 1.0, TransitionKind::Clock);
        assert_eq!(t.natural_linewidth, 0.0);
        assert_eq!(t.saturation_intensity(), 0.0);
    }

    #[test]
    fn sr_blue_saturation_intensity() {
        // π h c Γ / 3λ³ for 461 nm, 32 MHz is about 430 W/m² (43 mW/cm²).
        let isat = species(Isotope::Sr88).cooling1.saturation_intensity();
        assert!((isat - 430.0).abs() < 10.0, "{isat}");
    }

    #[test]
    fn cipm_override_accepted_and_bad_override_rejected() {
        let sr = species(Isotope::Sr87)
            .with_clock_frequency(429_228_004_229_873.0)
            .unwrap();
        assert_eq!(sr.clock_frequency, 429_228_004_229_873.0);
        assert!(species(Isotope::Sr87).with_clock_frequency(4.4e14).is_err());
    }

    #[test]
    fn override_rejects_nonpositive_mass() {
        let o = SpeciesOverride {
            mass: Some(0.0),
            ..Default::default()
        };
        assert!(o.apply(species(Isotope::Sr88)).is_err());
    }

    #[test]
    fn catalog_toml_round_trips() {
        #[derive(Deserialize)]
        struct Catalog {
            species: Vec<SpeciesRecord>,
        }
        let text = catalog_to_toml();
        let back: Catalog = toml::from_str(&text).unwrap();
        assert_eq!(back.species, species_catalog());
    }

    #[test]
    fn isotope_parse() {
        assert_eq!("sr88".parse::<Isotope>().unwrap(), Isotope::Sr88);
        assert!("Ca40".parse::<Isotope>().is_err());
    }
}
