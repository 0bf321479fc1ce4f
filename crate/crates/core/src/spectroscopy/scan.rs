use super::lineshape::{Lineshape, Spectrum};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Scans `line` over `detunings` with `atoms` atoms per point. Each point is
/// a binomial draw `B(N, p)/N` (quantum projection noise).
pub fn scan_line(line: &Lineshape, detunings: &[f64], atoms: f64, rng: &mut RngStream) -> Result<Spectrum> {
    if !(atoms >= 1.0) {
        return Err(Error::invalid(format!("scan needs at least one atom, got {atoms}")));
    }
    let n = atoms.round() as u64;
    let excitation_fractions = detunings
        .iter()
        .map(|&f| rng.projection_fraction(n, line.eval(f)))
        .collect();
    Ok(Spectrum {
        detunings: detunings.to_vec(),
        excitation_fractions,
        atom_number_per_point: n as f64,
    })
}
