//! Linearized noise model of an optomechanical circulator built from a
//! whispering-gallery resonator coupled to one or two mechanical modes.
//!
//! Frequencies are in units of the intrinsic optical loss rate `kappa_0`.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod params;
pub mod spectra;
pub mod verify;

pub use dynamics::{build_bare, build_supermode, check_stability, Basis, DriftSystem, StabilityReport};
pub use error::{Error, Result};
pub use params::{GlMode, PhysicalConfig};
pub use spectra::{spectra_at, sweep, InputSpectra, SpectraBundle, SpectraPoint, SweepOptions};
