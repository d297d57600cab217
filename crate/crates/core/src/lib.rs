//! Simulation of librational–translational state transfer for a levitated
//! ellipsoidal nanoparticle coupled to a driven optical cavity.
//!
//! Rates are angular (rad/s) and times are seconds throughout; conversion to
//! cyclic units happens only at the I/O boundary (see [`units`]).

pub mod analytic;
pub mod claims;
pub mod config;
pub mod error;
pub mod integrator;
pub mod model;
pub mod oracle;
pub mod physics;
pub mod presets;
pub mod sweep;
pub mod units;

pub use error::{Error, Result, Violation};
