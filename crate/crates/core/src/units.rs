//! Physical constants and the Hz <-> rad/s boundary.
//!
//! Everything inside the crate works in SI with angular frequencies and
//! hbar = 1 for dynamics. Conversions happen once, at the I/O edge.

use std::f64::consts::PI;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const EPSILON_0: f64 = 8.854_187_8128e-12;

pub const TWO_PI: f64 = 2.0 * PI;

/// Cyclic frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn to_angular(hz: f64) -> f64 {
    hz * TWO_PI
}

/// Angular frequency (rad/s) to cyclic frequency (Hz).
#[inline]
pub fn from_angular(rad_per_s: f64) -> f64 {
    rad_per_s / TWO_PI
}

/// kHz (cyclic) to rad/s, the unit the figure axes are quoted in.
#[inline]
pub fn khz(value: f64) -> f64 {
    to_angular(value * 1e3)
}
