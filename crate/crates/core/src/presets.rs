//! The reference parameter set: a 50 nm × 25 nm (semi-axes) particle in a
//! 10 mm, finesse-1e5 cavity at 1540 nm.

use std::f64::consts::PI;

use crate::model::{CavitySpec, ModeFrequencies, ParticlePose, ParticleSpec, PhysicalSetup};
use crate::physics::{DrivePair, Sideband};
use crate::units::{khz, to_angular};

pub fn reference_setup() -> PhysicalSetup {
    let cavity = CavitySpec::new(10e-3, 1540e-9, 1e5);
    PhysicalSetup {
        particle: ParticleSpec {
            density: 3500.0,
            semi_axis_long: 50e-9,
            semi_axis_short: 25e-9,
            rel_permittivity: 5.7,
        },
        cavity,
        // φ = 45°, centre of mass at (0, π/4k, 0)
        pose: ParticlePose::new(0.0, PI / (4.0 * cavity.wavenumber), 0.0, PI / 4.0),
        freqs: ModeFrequencies {
            omega_cav: cavity.omega(),
            omega_m: to_angular(247.7e3),
            omega_phi: to_angular(2.6e6),
        },
    }
}

/// Ω₁/2π = 2.66 GHz, Ω₂/2π = 50 GHz, δ/2π = 200 kHz on the beam-splitter sidebands.
pub fn reference_drives() -> DrivePair {
    DrivePair {
        rabi1: to_angular(2.66e9),
        rabi2: to_angular(5.0e10),
        delta: khz(200.0),
        sideband: Sideband::BeamSplitter,
    }
}

/// Headline conditional-dynamics points, cyclic kHz.
pub const HEADLINE_KAPPA_KHZ: f64 = 75.2;
pub const HEADLINE_G_KHZ: f64 = 50.0;
pub const HEADLINE_DELTA_KHZ: f64 = 200.0;
