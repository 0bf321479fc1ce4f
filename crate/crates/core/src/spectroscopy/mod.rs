//! Clock-transition spectroscopy.

mod lineshape;
mod rabi;
mod scan;
mod search;

pub use lineshape::{mean_occupation, scan_grid, synthesize_lineshape, Lineshape, ProbeConfig, Sidebands, Spectrum};
pub use rabi::{fourier_limited_fwhm, induced_rabi_frequency, pi_pulse_coupling, rabi_probability, InducedRabi};
pub use scan::scan_line;
pub use search::{chirp_search, ChirpSearchConfig, SearchOutcome};
