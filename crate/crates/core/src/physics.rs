//! From particle, trap and cavity parameters to the effective rates that
//! drive the state-transfer dynamics.
//!
//! The chain is: mass/inertia and susceptibilities → single-photon couplings
//! g_ab, g_ac → cavity linewidth κ → steady intracavity amplitudes α₁, α₂ →
//! mechanical displacements β, γ → cavity-eliminated couplings G₁, G₂, G₃.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DriveTone, ModeFrequencies, ParticleSpec, PhysicalSetup, SystemRates};
use crate::units::{HBAR, SPEED_OF_LIGHT, TWO_PI};

/// Diagonal of the dimensionless susceptibility tensor in the particle frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityPair {
    /// along the long axis
    pub s1: f64,
    /// along either short axis
    pub s2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaPair {
    /// kg
    pub mass: f64,
    /// kg m², about a short axis through the centre
    pub moment: f64,
}

pub fn mass_and_inertia(particle: &ParticleSpec) -> InertiaPair {
    let a = particle.semi_axis_long;
    let b = particle.semi_axis_short;
    let mass = particle.density * particle.volume();
    InertiaPair {
        mass,
        moment: mass * (a * a + b * b) / 5.0,
    }
}

/// Depolarization factors (N_long, N_short) of a prolate spheroid,
/// N_long + 2 N_short = 1.
pub fn depolarization_factors(particle: &ParticleSpec) -> Result<(f64, f64)> {
    let a = particle.semi_axis_long;
    let b = particle.semi_axis_short;
    if !(a > 0.0 && b > 0.0) || b > a {
        return Err(Error::InvalidInput(format!(
            "depolarization needs a prolate spheroid with a >= b > 0, got a = {a}, b = {b}"
        )));
    }
    let e2 = 1.0 - (b / a) * (b / a);
    let e = e2.sqrt();
    let n_long = if e < 1e-2 {
        // series about the sphere; the closed form cancels catastrophically here
        1.0 / 3.0 - 2.0 / 15.0 * e2 - 2.0 / 35.0 * e2 * e2 - 2.0 / 63.0 * e2 * e2 * e2
    } else {
        (1.0 - e2) / (e2 * e) * (e.atanh() - e)
    };
    Ok((n_long, 0.5 * (1.0 - n_long)))
}

/// s_i = (ε_r − 1) / (1 + N_i (ε_r − 1)).
pub fn susceptibility(particle: &ParticleSpec) -> Result<SusceptibilityPair> {
    let eps = particle.rel_permittivity;
    if !(eps > 1.0) {
        return Err(Error::InvalidInput(format!(
            "susceptibility needs rel_permittivity > 1, got {eps}"
        )));
    }
    let (n_long, n_short) = depolarization_factors(particle)?;
    let chi = eps - 1.0;
    Ok(SusceptibilityPair {
        s1: chi / (1.0 + n_long * chi),
        s2: chi / (1.0 + n_short * chi),
    })
}

/// Energy decay rate κ (rad/s), with κ/2π = c / (4 L 𝓕).
pub fn cavity_linewidth(cavity: &crate::model::CavitySpec) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / (4.0 * cavity.length * cavity.finesse)
}

fn transverse_envelope(setup: &PhysicalSetup) -> f64 {
    let PhysicalSetup { pose, cavity, .. } = setup;
    (-4.0 * PI * (pose.x * pose.x + pose.z * pose.z) / (cavity.wavelength * cavity.length)).exp()
}

/// Single-photon coupling to the translational mode along y (rad/s).
///
/// The susceptibility enters through the polarizability ε₀ V s_i, so the
/// vacuum permittivity cancels and the particle volume V remains.
pub fn coupling_g_ab(
    setup: &PhysicalSetup,
    inertia: &InertiaPair,
    sus: &SusceptibilityPair,
) -> f64 {
    let PhysicalSetup {
        particle,
        cavity,
        pose,
        freqs,
    } = setup;
    let zpf = (HBAR / (2.0 * inertia.mass * freqs.omega_m)).sqrt();
    let ky = cavity.wavenumber * pose.y;
    let lambda = cavity.wavelength;
    let l = cavity.length;
    let geometric = 32.0 * PI * PI * SPEED_OF_LIGHT * transverse_envelope(setup) * ky.cos() * ky.sin()
        / (lambda.powi(3) * l * l);
    let c2 = pose.phi.cos().powi(2);
    zpf * geometric * particle.volume() * (sus.s2 + c2 * (sus.s1 - sus.s2))
}

/// Single-photon coupling to the librational mode (rad/s).
pub fn coupling_g_ac(
    setup: &PhysicalSetup,
    inertia: &InertiaPair,
    sus: &SusceptibilityPair,
) -> f64 {
    let PhysicalSetup {
        particle,
        cavity,
        pose,
        freqs,
    } = setup;
    let zpf = (HBAR / (2.0 * inertia.moment * freqs.omega_phi)).sqrt();
    let ky = cavity.wavenumber * pose.y;
    let lambda = cavity.wavelength;
    let l = cavity.length;
    let geometric =
        8.0 * PI * SPEED_OF_LIGHT * transverse_envelope(setup) * ky.cos().powi(2) / (lambda * lambda * l * l);
    zpf * geometric * particle.volume() * (sus.s1 - sus.s2) * (2.0 * pose.phi).sin()
}

/// Classical intracavity amplitude α = Ω / (2(Δ + iκ/2)).
pub fn steady_amplitude(tone: &DriveTone, kappa: f64) -> Result<Complex64> {
    if tone.detuning == 0.0 && kappa == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let denom = Complex64::new(2.0 * tone.detuning, kappa);
    Ok(Complex64::new(tone.rabi, 0.0) / denom)
}

/// Steady mechanical displacements (β, γ), driven by the total intracavity
/// intensity |α₁|² + |α₂|².
pub fn steady_displacements(
    g_ab: f64,
    g_ac: f64,
    alpha1: Complex64,
    alpha2: Complex64,
    freqs: &ModeFrequencies,
) -> (f64, f64) {
    let intensity = alpha1.norm_sqr() + alpha2.norm_sqr();
    (-g_ab * intensity / freqs.omega_m, -g_ac * intensity / freqs.omega_phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detunings {
    pub delta1: f64,
    pub delta2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

struct Guard {
    tol: f64,
}

impl Guard {
    fn new(freqs: &ModeFrequencies) -> Self {
        Self {
            tol: 1e-6 * freqs.omega_m.max(freqs.omega_phi),
        }
    }

    fn inv(&self, term: &'static str, value: f64) -> Result<f64> {
        if value.abs() < self.tol {
            Err(Error::ResonantDenominator { term, value })
        } else {
            Ok(1.0 / value)
        }
    }
}

/// Second-order shifts of the two mechanical modes after eliminating the cavity.
fn mode_shifts(
    g_ab: f64,
    g_ac: f64,
    n1: f64,
    n2: f64,
    det: Detunings,
    freqs: &ModeFrequencies,
    guard: &Guard,
) -> Result<(f64, f64)> {
    let Detunings { delta1, delta2 } = det;
    let (wm, wp) = (freqs.omega_m, freqs.omega_phi);
    let b = n1 * g_ab * g_ab * (guard.inv("Δ1 + ω_m", delta1 + wm)? + guard.inv("Δ1 − ω_m", delta1 - wm)?)
        + n2 * g_ab * g_ab * (guard.inv("Δ2 + ω_m", delta2 + wm)? + guard.inv("Δ2 − ω_m", delta2 - wm)?);
    let c = n2 * g_ac * g_ac * (guard.inv("Δ2 + ω_φ", delta2 + wp)? + guard.inv("Δ2 − ω_φ", delta2 - wp)?)
        + n1 * g_ac * g_ac * (guard.inv("Δ1 + ω_φ", delta1 + wp)? + guard.inv("Δ1 − ω_φ", delta1 - wp)?);
    Ok((b, c))
}

/// G₁, G₂ (mode shifts) and G₃ (exchange) of the beam-splitter Hamiltonian
/// obtained by adiabatically eliminating the cavity.
///
/// Drive phases are absorbed into the mechanical operators, so only |α|
/// enters. G₃ keeps its two denominators Δ₁ + ω_m and Δ₁ − ω_φ.
pub fn effective_couplings(
    g_ab: f64,
    g_ac: f64,
    alpha1: Complex64,
    alpha2: Complex64,
    det: Detunings,
    freqs: &ModeFrequencies,
) -> Result<EffectiveCouplings> {
    let guard = Guard::new(freqs);
    let (n1, n2) = (alpha1.norm_sqr(), alpha2.norm_sqr());
    let (g1, g2) = mode_shifts(g_ab, g_ac, n1, n2, det, freqs, &guard)?;
    let cross = alpha1.norm() * alpha2.norm() * g_ab * g_ac;
    let g3 = cross
        * (guard.inv("Δ1 + ω_m", det.delta1 + freqs.omega_m)?
            + guard.inv("Δ1 − ω_φ", det.delta1 - freqs.omega_phi)?);
    Ok(EffectiveCouplings { g1, g2, g3 })
}

/// |G₁ − G₂| / max(|G₁|, |G₂|).
pub fn beamsplitter_balance_residual(rates: &SystemRates) -> Result<f64> {
    let scale = rates.g1.abs().max(rates.g2.abs());
    if scale == 0.0 {
        return Err(Error::BothZero);
    }
    Ok((rates.g1 - rates.g2).abs() / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fluctuation {
    pub magnitude: f64,
    /// photon-number fluctuation scale √|α|
    pub sqrt: f64,
    /// linear over nonlinear coupling enhancement |α| / √|α|
    pub ratio: f64,
}

impl Fluctuation {
    fn of(alpha: Complex64) -> Self {
        let magnitude = alpha.norm();
        let sqrt = magnitude.sqrt();
        let ratio = if magnitude == 0.0 { 0.0 } else { magnitude / sqrt };
        Self {
            magnitude,
            sqrt,
            ratio,
        }
    }
}

pub fn photon_fluctuation_report(alpha1: Complex64, alpha2: Complex64) -> [Fluctuation; 2] {
    [Fluctuation::of(alpha1), Fluctuation::of(alpha2)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezerCouplings {
    /// common mode shift G′₁ (translational-mode shift)
    pub g1p: f64,
    /// librational-mode shift, equal to `g1p` only for balanced drives
    pub g2p: f64,
    /// pair-creation rate G′₃
    pub g3p: f64,
    pub warnings: Vec<String>,
}

/// Couplings of the two-mode-squeezing Hamiltonian for drives on the blue
/// sidebands (Δ₁ − ω_m = Δ₂ − ω_φ = δ).
///
/// Derived with the same elimination as [`effective_couplings`], with the
/// roles of Δ + ω and Δ − ω exchanged:
/// G′₃ = |α₁α₂| g_ab g_ac (1/(Δ₁ − ω_m) + 1/(Δ₁ + ω_φ)).
/// The shifts have the same form as G₁ and G₂, which are even in ±ω.
pub fn squeezer_couplings(
    g_ab: f64,
    g_ac: f64,
    alpha1: Complex64,
    alpha2: Complex64,
    det: Detunings,
    freqs: &ModeFrequencies,
) -> Result<SqueezerCouplings> {
    let guard = Guard::new(freqs);
    let d1 = det.delta1 - freqs.omega_m;
    let d2 = det.delta2 - freqs.omega_phi;
    if (d1 - d2).abs() > guard.tol {
        return Err(Error::InvalidInput(format!(
            "squeezer needs Δ1 − ω_m = Δ2 − ω_φ, got {d1:e} and {d2:e} rad/s"
        )));
    }
    let (n1, n2) = (alpha1.norm_sqr(), alpha2.norm_sqr());
    let (g1p, g2p) = mode_shifts(g_ab, g_ac, n1, n2, det, freqs, &guard)?;
    let cross = alpha1.norm() * alpha2.norm() * g_ab * g_ac;
    let g3p = cross
        * (guard.inv("Δ1 − ω_m", det.delta1 - freqs.omega_m)?
            + guard.inv("Δ1 + ω_φ", det.delta1 + freqs.omega_phi)?);

    let mut warnings = Vec::new();
    let enhanced = (g_ab * alpha1.norm()).abs().max((g_ac * alpha2.norm()).abs());
    if enhanced > 0.0 && d1.abs() / enhanced < 10.0 {
        warnings.push(format!(
            "detuning δ = {:e} rad/s is only {:.2}× the enhanced coupling; elimination is unreliable",
            d1,
            d1.abs() / enhanced
        ));
    }
    Ok(SqueezerCouplings {
        g1p,
        g2p,
        g3p,
        warnings,
    })
}

/// Which pair of motional sidebands the two drives address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sideband {
    /// Δ₁ + ω_m = Δ₂ + ω_φ = δ
    BeamSplitter,
    /// Δ₁ − ω_m = Δ₂ − ω_φ = δ
    Squeezer,
}

/// Two drive strengths plus the common sideband detuning δ (all rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivePair {
    pub rabi1: f64,
    pub rabi2: f64,
    pub delta: f64,
    pub sideband: Sideband,
}

impl DrivePair {
    pub fn detunings(&self, freqs: &ModeFrequencies) -> Detunings {
        match self.sideband {
            Sideband::BeamSplitter => Detunings {
                delta1: self.delta - freqs.omega_m,
                delta2: self.delta - freqs.omega_phi,
            },
            Sideband::Squeezer => Detunings {
                delta1: self.delta + freqs.omega_m,
                delta2: self.delta + freqs.omega_phi,
            },
        }
    }

    pub fn tones(&self, freqs: &ModeFrequencies) -> Result<(DriveTone, DriveTone)> {
        let d = self.detunings(freqs);
        Ok((
            DriveTone::new(self.rabi1, d.delta1)?,
            DriveTone::new(self.rabi2, d.delta2)?,
        ))
    }
}

/// Single-photon stage of the pipeline, independent of the drives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BareCouplings {
    pub inertia: InertiaPair,
    pub susceptibility: SusceptibilityPair,
    pub g_ab: f64,
    pub g_ac: f64,
    pub kappa: f64,
}

pub fn bare_couplings(setup: &PhysicalSetup) -> Result<BareCouplings> {
    let inertia = mass_and_inertia(&setup.particle);
    let sus = susceptibility(&setup.particle)?;
    Ok(BareCouplings {
        inertia,
        susceptibility: sus,
        g_ab: coupling_g_ab(setup, &inertia, &sus),
        g_ac: coupling_g_ac(setup, &inertia, &sus),
        kappa: cavity_linewidth(&setup.cavity),
    })
}

/// Full pipeline. For squeezer drives, `g1`/`g2` hold the mode shifts and
/// `g3` the pair-creation rate G′₃.
pub fn derive_rates(setup: &PhysicalSetup, drives: &DrivePair) -> Result<SystemRates> {
    let bare = bare_couplings(setup)?;
    derive_rates_from(setup, &bare, drives)
}

pub fn derive_rates_from(
    setup: &PhysicalSetup,
    bare: &BareCouplings,
    drives: &DrivePair,
) -> Result<SystemRates> {
    let (t1, t2) = drives.tones(&setup.freqs)?;
    let alpha1 = steady_amplitude(&t1, bare.kappa)?;
    let alpha2 = steady_amplitude(&t2, bare.kappa)?;
    let (beta, gamma) = steady_displacements(bare.g_ab, bare.g_ac, alpha1, alpha2, &setup.freqs);
    let det = drives.detunings(&setup.freqs);
    let (g1, g2, g3) = match drives.sideband {
        Sideband::BeamSplitter => {
            let e = effective_couplings(bare.g_ab, bare.g_ac, alpha1, alpha2, det, &setup.freqs)?;
            (e.g1, e.g2, e.g3)
        }
        Sideband::Squeezer => {
            let s = squeezer_couplings(bare.g_ab, bare.g_ac, alpha1, alpha2, det, &setup.freqs)?;
            (s.g1p, s.g2p, s.g3p)
        }
    };
    Ok(SystemRates {
        g_ab: bare.g_ab,
        g_ac: bare.g_ac,
        kappa: bare.kappa,
        alpha1,
        alpha2,
        beta,
        gamma,
        g1,
        g2,
        g3,
    })
}

/// Bisects over Ω₂ until G₁ = G₂, keeping Ω₁ fixed. Returns the balancing Ω₂.
pub fn balance_drive(setup: &PhysicalSetup, drives: &DrivePair) -> Result<f64> {
    let bare = bare_couplings(setup)?;
    let diff = |rabi2: f64| -> Result<f64> {
        let d = DrivePair { rabi2, ..*drives };
        let r = derive_rates_from(setup, &bare, &d)?;
        Ok(r.g1 - r.g2)
    };
    let f0 = diff(0.0)?;
    if f0 == 0.0 {
        return Ok(0.0);
    }
    let mut hi = drives.rabi2.max(drives.rabi1).max(1.0);
    let limit = hi * 1e12;
    let mut fhi = diff(hi)?;
    while f0.signum() == fhi.signum() {
        hi *= 10.0;
        if hi > limit {
            return Err(Error::NoBalance { limit });
        }
        fhi = diff(hi)?;
    }
    let mut lo = 0.0;
    let mut flo = f0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = diff(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
