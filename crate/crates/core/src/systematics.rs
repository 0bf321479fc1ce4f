//! Systematic frequency shifts and the fractional uncertainty budget.
//!
//! Default coefficients (black-body, quadratic Zeeman, collisional) are
//! literature-scale values, not measurements of this apparatus. Each entry
//! carries a provenance label in the scenario file.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional inaccuracy goal for the transportable clocks.
pub const INACCURACY_GOAL: f64 = 5e-17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftEntry {
    pub name: String,
    /// Hz
    pub shift: f64,
    /// Hz
    pub uncertainty: f64,
    pub fractional_shift: f64,
    pub fractional_uncertainty: f64,
}

impl ShiftEntry {
    pub fn new(name: impl Into<String>, shift: f64, uncertainty: f64, nu0: f64) -> Result<Self> {
        if !(uncertainty >= 0.0) {
            return Err(Error::invalid("shift uncertainty must be >= 0"));
        }
        if !(nu0 > 0.0) {
            return Err(Error::invalid("clock frequency must be > 0"));
        }
        Ok(ShiftEntry {
            name: name.into(),
            shift,
            uncertainty,
            fractional_shift: shift / nu0,
            fractional_uncertainty: uncertainty / nu0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BbrModel {
    /// Shift at the reference temperature, Hz.
    pub coefficient: f64,
    /// K
    #[serde(default = "room_temperature")]
    pub reference_temperature: f64,
}

fn room_temperature() -> f64 {
    300.0
}

impl BbrModel {
    /// Sr black-body shift scale at 300 K.
    pub const STRONTIUM: BbrModel = BbrModel {
        coefficient: -2.4,
        reference_temperature: 300.0,
    };
    /// Yb black-body shift scale at 300 K.
    pub const YTTERBIUM: BbrModel = BbrModel {
        coefficient: -1.25,
        reference_temperature: 300.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_temperature > 0.0) {
            return Err(Error::config("systematics.bbr.reference_temperature", "must be > 0"));
        }
        Ok(())
    }

    /// `dΔν/dT = 4κT³/T_ref⁴`, Hz/K.
    pub fn sensitivity(&self, temperature: f64) -> f64 {
        4.0 * self.coefficient * temperature.powi(3) / self.reference_temperature.powi(4)
    }
}

/// `Δν = κ·(T/T_ref)⁴`.
pub fn bbr_shift(temperature: f64, model: &BbrModel) -> Result<f64> {
    model.validate()?;
    if !(temperature > 0.0) {
        return Err(Error::invalid("black-body temperature must be > 0"));
    }
    Ok(model.coefficient * (temperature / model.reference_temperature).powi(4))
}

/// Shift difference between atoms probed in two tubes at `t1` and `t2`.
pub fn two_tube_differential(t1: f64, t2: f64, model: &BbrModel) -> Result<f64> {
    Ok(bbr_shift(t1, model)? - bbr_shift(t2, model)?)
}

/// Coefficient recovered from a measured two-tube differential,
/// `κ = Δ·T_ref⁴/(T₁⁴ − T₂⁴)`.
pub fn invert_bbr_coefficient(differential: f64, t1: f64, t2: f64, reference_temperature: f64) -> Result<f64> {
    if !(t1 > 0.0 && t2 > 0.0 && reference_temperature > 0.0) {
        return Err(Error::invalid("tube and reference temperatures must be > 0"));
    }
    let r1 = t1 / reference_temperature;
    let r2 = t2 / reference_temperature;
    let denom = r1.powi(4) - r2.powi(4);
    if denom == 0.0 {
        return Err(Error::Degenerate(
            "equal tube temperatures carry no information on the coefficient".into(),
        ));
    }
    Ok(differential / denom)
}

/// `Δν = β·B²`.
pub fn quadratic_zeeman(field: f64, beta: f64) -> f64 {
    beta * field * field
}

/// Propagated uncertainty `|2βB|·δB`.
pub fn quadratic_zeeman_uncertainty(field: f64, beta: f64, field_uncertainty: f64) -> f64 {
    (2.0 * beta * field).abs() * field_uncertainty
}

/// `Δν = coefficient·N/V`.
pub fn density_shift(atoms: f64, volume: f64, coefficient: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::invalid("trap volume must be > 0"));
    }
    Ok(coefficient * atoms / volume)
}

/// Volume occupied by atoms spread over `sites` lattice sites of a beam of
/// waist `waist`: `π·w²·(sites·λ/2)`.
pub fn lattice_volume(waist: f64, wavelength: f64, sites: f64) -> f64 {
    std::f64::consts::PI * waist * waist * sites * wavelength / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Budget {
    pub entries: Vec<ShiftEntry>,
    pub nu0: f64,
    pub total_fractional_shift: f64,
    pub total_fractional_uncertainty: f64,
    pub goal: f64,
    pub pass: bool,
}

/// Sums shifts linearly and uncertainties in quadrature.
pub fn total_budget(entries: Vec<ShiftEntry>, nu0: f64) -> Result<Budget> {
    if entries.is_empty() {
        return Err(Error::invalid("budget needs at least one entry"));
    }
    if !(nu0 > 0.0) {
        return Err(Error::invalid("clock frequency must be > 0"));
    }
    let shift: f64 = entries.iter().map(|e| e.shift).sum();
    let rss = entries
        .iter()
        .map(|e| e.uncertainty * e.uncertainty)
        .sum::<f64>()
        .sqrt();
    let total_fractional_uncertainty = rss / nu0;
    Ok(Budget {
        entries,
        nu0,
        total_fractional_shift: shift / nu0,
        total_fractional_uncertainty,
        goal: INACCURACY_GOAL,
        pass: total_fractional_uncertainty < INACCURACY_GOAL,
    })
}

impl Budget {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}  {:>12}  {:>12}",
            "entry", "shift_Hz", "unc_Hz", "frac_shift", "frac_unc"
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.4e}  {:>12.4e}  {:>12.4e}  {:>12.4e}",
                e.name, e.shift, e.uncertainty, e.fractional_shift, e.fractional_uncertainty
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}  {:>12.4e}  {:>12.4e}",
            "total", "", "", self.total_fractional_shift, self.total_fractional_uncertainty
        );
        let _ = writeln!(
            out,
            "goal {:.1e}: {}",
            self.goal,
            if self.pass { "PASS" } else { "FAIL" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NU0: f64 = 4.295e14;

    #[test]
    fn bbr_reference_and_quartic() {
        let m = BbrModel::STRONTIUM;
        assert_eq!(bbr_shift(300.0, &m).unwrap(), m.coefficient);
        let r = bbr_shift(600.0, &m).unwrap() / m.coefficient;
        assert!((r - 16.0).abs() < 1e-12);
        assert!(bbr_shift(0.0, &m).is_err());
    }

    #[test]
    fn bbr_control_at_300k() {
        let m = BbrModel::STRONTIUM;
        let dnu = (m.sensitivity(300.0) * 0.1).abs();
        assert!((dnu - 3.2e-3).abs() < 1e-12);
        assert!(dnu / NU0 < 1e-17);
    }

    #[test]
    fn two_tube_ratio_and_inversion() {
        let m = BbrModel::STRONTIUM;
        assert_eq!(two_tube_differential(320.0, 320.0, &m).unwrap(), 0.0);
        let r = two_tube_differential(600.0, 300.0, &m).unwrap() / two_tube_differential(450.0, 300.0, &m).unwrap();
        assert!((r - 15.0 / 4.0625).abs() < 1e-12);
        let d = two_tube_differential(373.0, 296.0, &m).unwrap();
        let k = invert_bbr_coefficient(d, 373.0, 296.0, 300.0).unwrap();
        assert!((k - m.coefficient).abs() / m.coefficient.abs() < 1e-9);
        assert!(matches!(
            invert_bbr_coefficient(0.0, 300.0, 300.0, 300.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn zeeman() {
        assert_eq!(quadratic_zeeman(0.0, -23.3e6), 0.0);
        let a = quadratic_zeeman(1.1e-3, -23.3e6);
        let b = quadratic_zeeman(0.55e-3, -23.3e6);
        assert!((a / b - 4.0).abs() < 1e-12);
        // −23.3 Hz/mT² at 1.1 mT, 1% field uncertainty
        assert!((a + 28.193).abs() < 1e-3);
        let u = quadratic_zeeman_uncertainty(1.1e-3, -23.3e6, 1.1e-5);
        assert!((u - 0.563_86).abs() < 1e-4, "{u}");
    }

    #[test]
    fn density() {
        assert_eq!(density_shift(0.0, 1e-12, -2e-19).unwrap(), 0.0);
        let a = density_shift(5e5, 1e-12, -2e-19).unwrap();
        let b = density_shift(1e6, 1e-12, -2e-19).unwrap();
        assert!((b / a - 2.0).abs() < 1e-12);
        assert!(density_shift(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn budget_single_and_pair() {
        let e = ShiftEntry::new("a", 1.0, 0.01, NU0).unwrap();
        let b = total_budget(vec![e.clone()], NU0).unwrap();
        assert_eq!(b.total_fractional_shift, e.fractional_shift);
        assert_eq!(b.total_fractional_uncertainty, e.fractional_uncertainty);
        let b2 = total_budget(
            vec![
                e.clone(),
                ShiftEntry {
                    name: "b".into(),
                    ..e.clone()
                },
            ],
            NU0,
        )
        .unwrap();
        assert!((b2.total_fractional_uncertainty - e.fractional_uncertainty * 2f64.sqrt()).abs() < 1e-30);
        assert!(total_budget(vec![], NU0).is_err());
        assert!(b.to_table().contains("PASS"));
        let big = ShiftEntry::new("c", 1.0, 1.0, NU0).unwrap();
        assert!(total_budget(vec![big], NU0).unwrap().to_table().contains("FAIL"));
    }
}
