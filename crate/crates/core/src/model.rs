//! Domain types shared by every stage of the pipeline.
//!
//! Frequencies are angular (rad/s) throughout; lengths in metres.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::units::{SPEED_OF_LIGHT, TWO_PI};

/// Prolate spheroidal particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    /// kg/m^3
    pub density: f64,
    /// m
    pub semi_axis_long: f64,
    /// m
    pub semi_axis_short: f64,
    pub rel_permittivity: f64,
}

impl ParticleSpec {
    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.semi_axis_long * self.semi_axis_short * self.semi_axis_short
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    pub length: f64,
    pub wavelength: f64,
    pub finesse: f64,
    /// 2π/λ, kept alongside the wavelength so a mismatch is detectable.
    pub wavenumber: f64,
}

impl CavitySpec {
    pub fn new(length: f64, wavelength: f64, finesse: f64) -> Self {
        Self {
            length,
            wavelength,
            finesse,
            wavenumber: TWO_PI / wavelength,
        }
    }

    /// Angular frequency of the cavity mode.
    pub fn omega(&self) -> f64 {
        TWO_PI * SPEED_OF_LIGHT / self.wavelength
    }
}

/// Centre-of-mass position relative to the cavity centre, plus the angle
/// between the particle's long axis and the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticlePose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phi: f64,
}

impl ParticlePose {
    /// Builds a pose with `phi` folded into [0, π).
    pub fn new(x: f64, y: f64, z: f64, phi: f64) -> Self {
        Self {
            x,
            y,
            z,
            phi: normalize_angle(phi),
        }
    }
}

/// Folds an angle into [0, π). Couplings only depend on 2φ.
pub fn normalize_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(PI);
    // rem_euclid can round up to exactly π for tiny negative inputs
    if r >= PI {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeFrequencies {
    pub omega_cav: f64,
    pub omega_m: f64,
    pub omega_phi: f64,
}

/// One driving laser: Rabi strength Ω and detuning Δ = ω_L − ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTone {
    pub rabi: f64,
    pub detuning: f64,
}

impl DriveTone {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        if !(rabi >= 0.0) || !rabi.is_finite() || !detuning.is_finite() {
            return Err(Error::InvalidInput(format!(
                "drive tone needs finite rabi >= 0 and finite detuning, got ({rabi}, {detuning})"
            )));
        }
        Ok(Self { rabi, detuning })
    }
}

/// Every rate derived from a setup and its pair of drive tones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemRates {
    pub g_ab: f64,
    pub g_ac: f64,
    pub kappa: f64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub beta: f64,
    pub gamma: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Amplitudes over (|0⟩a|01⟩bc, |0⟩a|10⟩bc, |1⟩a|00⟩bc).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceState {
    /// librational quantum (mode c) occupied
    pub c001: Complex64,
    /// translational quantum (mode b) occupied
    pub c010: Complex64,
    /// photon occupied
    pub c100: Complex64,
}

impl SubspaceState {
    pub const INITIAL: SubspaceState = SubspaceState {
        c001: Complex64::new(1.0, 0.0),
        c010: Complex64::new(0.0, 0.0),
        c100: Complex64::new(0.0, 0.0),
    };

    pub fn new(c001: Complex64, c010: Complex64, c100: Complex64) -> Self {
        Self { c001, c010, c100 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c001.norm_sqr() + self.c010.norm_sqr() + self.c100.norm_sqr()
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.c001, self.c010, self.c100]
    }

    pub fn from_slice(v: &[Complex64]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.c001 * s, self.c010 * s, self.c100 * s)
    }

    pub fn max_abs_diff(&self, other: &SubspaceState) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Pure state on a truncated product of Fock spaces, row-major in mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub cutoffs: Vec<usize>,
    pub amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn new(cutoffs: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = product_dim(&cutoffs);
        if amplitudes.len() != dim {
            return Err(Error::InvalidInput(format!(
                "amplitude vector has length {}, cutoffs {:?} need {}",
                amplitudes.len(),
                cutoffs,
                dim
            )));
        }
        let state = Self { cutoffs, amplitudes };
        let n = state.norm();
        if n > 1.0 + 1e-9 {
            return Err(Error::NotNormalized(n));
        }
        Ok(state)
    }

    /// Basis vector with the given occupation per mode.
    pub fn basis(cutoffs: &[usize], occupation: &[usize]) -> Result<Self> {
        let dim = product_dim(cutoffs);
        let idx = occupation_index(cutoffs, occupation).ok_or_else(|| {
            Error::InvalidInput(format!("occupation {occupation:?} outside cutoffs {cutoffs:?}"))
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            cutoffs: cutoffs.to_vec(),
            amplitudes,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Option<Complex64> {
        occupation_index(&self.cutoffs, occupation).map(|i| self.amplitudes[i])
    }
}

pub fn product_dim(cutoffs: &[usize]) -> usize {
    cutoffs.iter().map(|c| c + 1).product()
}

/// Row-major index of an occupation tuple, `None` if out of range.
pub fn occupation_index(cutoffs: &[usize], occupation: &[usize]) -> Option<usize> {
    if cutoffs.len() != occupation.len() {
        return None;
    }
    let mut idx = 0;
    for (&c, &n) in cutoffs.iter().zip(occupation) {
        if n > c {
            return None;
        }
        idx = idx * (c + 1) + n;
    }
    Some(idx)
}

/// Inverse of [`occupation_index`].
pub fn occupation_of(cutoffs: &[usize], mut idx: usize) -> Vec<usize> {
    let mut occ = vec![0; cutoffs.len()];
    for (slot, &c) in occ.iter_mut().zip(cutoffs).rev() {
        *slot = idx % (c + 1);
        idx /= c + 1;
    }
    occ
}

/// Everything needed to derive the single-photon couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    pub particle: ParticleSpec,
    pub cavity: CavitySpec,
    pub pose: ParticlePose,
    pub freqs: ModeFrequencies,
}

impl PhysicalSetup {
    /// Soft problems that do not invalidate the setup.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.freqs.omega_phi <= self.freqs.omega_m {
            w.push(format!(
                "librational frequency {:e} rad/s is not above the translational {:e} rad/s",
                self.freqs.omega_phi, self.freqs.omega_m
            ));
        }
        w
    }
}

fn check_positive(out: &mut Vec<Violation>, field: &str, v: f64) {
    if !v.is_finite() {
        out.push(Violation::new(field, format!("must be finite, got {v}")));
    } else if v <= 0.0 {
        out.push(Violation::new(field, format!("must be > 0, got {v}")));
    }
}

/// Checks every type invariant and reports all violations at once.
pub fn validate_setup(setup: PhysicalSetup) -> Result<PhysicalSetup, Vec<Violation>> {
    let mut v = Vec::new();
    let p = &setup.particle;
    check_positive(&mut v, "particle.density", p.density);
    check_positive(&mut v, "particle.semi_axis_long", p.semi_axis_long);
    check_positive(&mut v, "particle.semi_axis_short", p.semi_axis_short);
    check_positive(&mut v, "particle.rel_permittivity", p.rel_permittivity);
    if p.semi_axis_long < p.semi_axis_short {
        v.push(Violation::new(
            "particle.semi_axis_long",
            format!(
                "long semi-axis {} is shorter than short semi-axis {} (prolate spheroid required)",
                p.semi_axis_long, p.semi_axis_short
            ),
        ));
    }

    let c = &setup.cavity;
    check_positive(&mut v, "cavity.length", c.length);
    check_positive(&mut v, "cavity.wavelength", c.wavelength);
    check_positive(&mut v, "cavity.finesse", c.finesse);
    if c.wavelength > 0.0 && c.wavelength.is_finite() {
        let expected = TWO_PI / c.wavelength;
        if !(((c.wavenumber - expected) / expected).abs() <= 1e-12) {
            v.push(Violation::new(
                "cavity.wavenumber",
                format!("{} is inconsistent with 2π/λ = {}", c.wavenumber, expected),
            ));
        }
    }

    let pose = &setup.pose;
    for (name, val) in [("pose.x", pose.x), ("pose.y", pose.y), ("pose.z", pose.z)] {
        if !val.is_finite() {
            v.push(Violation::new(name, format!("must be finite, got {val}")));
        }
    }
    if !(pose.phi >= 0.0 && pose.phi < PI) {
        v.push(Violation::new(
            "pose.phi",
            format!("must lie in [0, π), got {}", pose.phi),
        ));
    }

    let f = &setup.freqs;
    check_positive(&mut v, "freqs.omega_cav", f.omega_cav);
    check_positive(&mut v, "freqs.omega_m", f.omega_m);
    check_positive(&mut v, "freqs.omega_phi", f.omega_phi);

    if v.is_empty() {
        Ok(setup)
    } else {
        Err(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::reference_setup;

    #[test]
    fn reference_parameters_are_valid() {
        let s = reference_setup();
        assert_eq!(validate_setup(s), Ok(s));
        assert!(s.warnings().is_empty());
    }

    #[test]
    fn zero_short_axis_is_rejected() {
        let mut s = reference_setup();
        s.particle.semi_axis_short = 0.0;
        let errs = validate_setup(s).unwrap_err();
        assert!(errs.iter().any(|e| e.field == "particle.semi_axis_short"));
    }

    #[test]
    fn inconsistent_wavenumber_is_rejected() {
        let mut s = reference_setup();
        s.cavity.wavenumber = 1.0;
        let errs = validate_setup(s).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].field, "cavity.wavenumber");
    }

    #[test]
    fn all_violations_reported() {
        let mut s = reference_setup();
        s.particle.density = -1.0;
        s.cavity.finesse = 0.0;
        s.freqs.omega_m = f64::NAN;
        s.pose.phi = 4.0;
        let errs = validate_setup(s).unwrap_err();
        let fields: Vec<_> = errs.iter().map(|e| e.field.as_str()).collect();
        assert_eq!(
            fields,
            ["particle.density", "cavity.finesse", "pose.phi", "freqs.omega_m"]
        );
    }

    #[test]
    fn oblate_particle_rejected() {
        let mut s = reference_setup();
        s.particle.semi_axis_long = 10e-9;
        assert!(validate_setup(s).is_err());
    }

    #[test]
    fn validation_is_idempotent() {
        let s = validate_setup(reference_setup()).unwrap();
        assert_eq!(validate_setup(s), Ok(s));
    }

    #[test]
    fn swapped_mode_order_warns_only() {
        let mut s = reference_setup();
        std::mem::swap(&mut s.freqs.omega_m, &mut s.freqs.omega_phi);
        assert!(validate_setup(s).is_ok());
        assert_eq!(s.warnings().len(), 1);
    }

    #[test]
    fn angle_folding() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert!((normalize_angle(PI + 0.25) - 0.25).abs() < 1e-15);
        assert!((normalize_angle(-0.25) - (PI - 0.25)).abs() < 1e-15);
        assert_eq!(normalize_angle(-1e-300), 0.0);
        let p = ParticlePose::new(0.0, 0.0, 0.0, 5.0 * PI / 4.0);
        assert!((p.phi - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn occupation_indexing_round_trips() {
        let cutoffs = [1, 2, 3];
        for i in 0..product_dim(&cutoffs) {
            let occ = occupation_of(&cutoffs, i);
            assert_eq!(occupation_index(&cutoffs, &occ), Some(i));
        }
        assert_eq!(occupation_index(&[1, 1, 1], &[1, 0, 0]), Some(4));
        assert_eq!(occupation_index(&[1, 1], &[2, 0]), None);
    }

    #[test]
    fn fock_state_length_checked() {
        assert!(FockState::new(vec![1, 1], vec![Complex64::new(1.0, 0.0); 3]).is_err());
        let s = FockState::basis(&[2, 2], &[1, 2]).unwrap();
        assert_eq!(s.amplitude(&[1, 2]), Some(Complex64::new(1.0, 0.0)));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }
}
