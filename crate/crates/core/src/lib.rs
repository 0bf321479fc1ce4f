//! Deterministic, seedable simulator of a transportable optical lattice clock.
//!
//! The crate follows an atom sample from the oven through two MOT stages into
//! a 1D magic-wavelength lattice ([`prep`], [`lattice`]), interrogates the
//! clock transition ([`spectroscopy`]), closes a frequency lock around a noisy
//! local oscillator ([`noise`], [`servo`]), and evaluates the resulting
//! instability ([`stability`]) and systematic shift budget ([`systematics`]).
//!
//! Two shipped scenarios, `sr-breadboard` and `yb-breadboard`, bind all of the
//! above together ([`scenario`], [`commands`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod constants;
pub mod error;
pub mod fit;
pub mod lattice;
pub mod noise;
pub mod prep;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod servo;
pub mod species;
pub mod spectroscopy;
pub mod stability;
pub mod systematics;

pub use error::{Error, Result};
pub use noise::{FrequencyTrace, NoiseSpec};
pub use rng::RngStream;
pub use species::{Isotope, SpeciesRecord, TransitionKind, TransitionRecord};
