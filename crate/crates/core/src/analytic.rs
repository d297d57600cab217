//! Closed-form evolution in the single-excitation subspace.
//!
//! All rates are angular (rad/s) with ħ = 1; times are seconds. The initial
//! state is always |0⟩a|01⟩bc (one librational quantum) and the target is
//! |0⟩a|10⟩bc.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModeFrequencies, SubspaceState};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// lossless resonant three-mode exchange
    Ideal,
    Detuned,
    Resonant,
    /// cavity-eliminated two-mode exchange
    Beamsplitter,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ideal => "ideal",
            Scheme::Detuned => "detuned",
            Scheme::Resonant => "resonant",
            Scheme::Beamsplitter => "beamsplitter",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" | "ideal-resonant" => Ok(Scheme::Ideal),
            "detuned" => Ok(Scheme::Detuned),
            "resonant" => Ok(Scheme::Resonant),
            "beamsplitter" => Ok(Scheme::Beamsplitter),
            other => Err(Error::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

/// χ, E₂, E₃ of the conditional Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSpectrum {
    pub chi: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub time: f64,
    pub fidelity: f64,
    pub probability: f64,
    pub scheme: Scheme,
}

/// Lossless resonant exchange through the cavity, both couplings equal to `g`.
pub fn resonant_three_mode_amplitudes(t: f64, g: f64) -> SubspaceState {
    let theta = SQRT_2 * g * t;
    let (s, co) = theta.sin_cos();
    SubspaceState::new(
        c(0.5 * (1.0 + co)),
        c(-0.5 * (1.0 - co)),
        Complex64::new(0.0, -FRAC_1_SQRT_2 * s),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Rotating,
    Lab,
}

/// (c01, c10): amplitudes of |0⟩b|1⟩c and |1⟩b|0⟩c under the balanced
/// beam-splitter Hamiltonian (G₁ = G₂).
pub fn beamsplitter_amplitudes(
    t: f64,
    g1: f64,
    g3: f64,
    frame: Frame,
    freqs: Option<&ModeFrequencies>,
) -> Result<(Complex64, Complex64)> {
    let plus = (-I * (g1 + g3) * t).exp();
    let minus = (-I * (g1 - g3) * t).exp();
    let c01 = 0.5 * (plus + minus);
    let c10 = 0.5 * (plus - minus);
    match frame {
        Frame::Rotating => Ok((c01, c10)),
        Frame::Lab => {
            let f = freqs.ok_or_else(|| {
                Error::InvalidInput("lab frame needs the mechanical mode frequencies".into())
            })?;
            Ok((
                c01 * (-I * f.omega_phi * t).exp(),
                c10 * (-I * f.omega_m * t).exp(),
            ))
        }
    }
}

pub fn conditional_spectrum(g: f64, delta: f64, kappa: f64) -> ConditionalSpectrum {
    let chi_sq = Complex64::new(
        4.0 * delta * delta + 32.0 * g * g - kappa * kappa,
        4.0 * delta * kappa,
    );
    let chi = chi_sq.sqrt();
    let base = Complex64::new(-2.0 * delta, -kappa);
    ConditionalSpectrum {
        chi,
        e2: 0.25 * (base - chi),
        e3: 0.25 * (base + chi),
    }
}

// χ is the root of a quantity of order scale², so rounding alone leaves it
// near 1e-8·scale at the exceptional point; 1e-6·scale sits clear of that.
fn check_chi(chi: Complex64, scale: f64) -> Result<()> {
    if chi.norm() <= 1e-6 * scale {
        Err(Error::DegenerateSpectrum {
            chi_abs: chi.norm(),
        })
    } else {
        Ok(())
    }
}

/// No-jump amplitudes of the off-resonant scheme (photon state detuned by δ).
pub fn detuned_conditional_amplitudes(
    t: f64,
    g: f64,
    delta: f64,
    kappa: f64,
) -> Result<SubspaceState> {
    let spec = conditional_spectrum(g, delta, kappa);
    let chi = spec.chi;
    check_chi(chi, g.abs().max(delta.abs()).max(kappa.abs()).max(1.0))?;

    // (2δ + iκ + χ)(2δ + iκ − χ) = −32G²; whichever factor would cancel
    // is recovered from the product instead of by subtraction.
    let base = Complex64::new(2.0 * delta, kappa);
    let (mut plus, mut minus) = (base + chi, base - chi);
    let product = c(-32.0 * g * g);
    if plus.norm() >= minus.norm() {
        minus = product / plus;
    } else {
        plus = product / minus;
    }

    let ph3 = (-I * spec.e3 * t).exp();
    let ph2 = (-I * spec.e2 * t).exp();
    let sym = plus / (4.0 * chi) * ph3 - minus / (4.0 * chi) * ph2;
    // −(plus·minus)/(16Gχ) = 2G/χ, which stays finite as G → 0
    let c3 = (-I * delta * t).exp() * (2.0 * g / chi) * (ph3 - ph2);
    Ok(SubspaceState::new(c(0.5) + sym, c(-0.5) + sym, c3))
}

/// No-jump amplitudes on resonance (δ = 0).
///
/// With Ω = √(32G² − κ²), the exchange part is
/// e^{−κt/4} (½ cos(Ωt/4) + κ/(2Ω) sin(Ωt/4)), which satisfies the initial
/// condition dC₁/dt = 0. For 32G² < κ², Ω is imaginary and the same
/// expressions continue to the overdamped (hyperbolic) branch.
pub fn resonant_conditional_amplitudes(t: f64, g: f64, kappa: f64) -> Result<SubspaceState> {
    let omega = c(32.0 * g * g - kappa * kappa).sqrt();
    check_chi(omega, g.abs().max(kappa.abs()).max(1.0))?;
    let theta = omega * t / 4.0;
    let decay = (-kappa * t / 4.0).exp();
    let sym = decay * (0.5 * theta.cos() + kappa / (2.0 * omega) * theta.sin());
    let c3 = -I * (4.0 * g / omega) * decay * theta.sin();
    Ok(SubspaceState::new(c(0.5) + sym, c(-0.5) + sym, c3))
}

/// Fidelity F = |c010| / √P against |0⟩a|10⟩bc, and branch probability P.
pub fn fidelity_and_probability(state: &SubspaceState) -> Result<(f64, f64)> {
    let p = state.norm_sqr();
    if !(p > 1e-300) {
        return Err(Error::VanishedBranch(p));
    }
    Ok((state.c010.norm() / p.sqrt(), p))
}

/// Printed transfer time of each scheme. For `Beamsplitter`, `g` is G₃.
pub fn transfer_time(scheme: Scheme, g: f64, delta: f64, kappa: f64) -> Result<f64> {
    let t = match scheme {
        Scheme::Ideal => PI / (SQRT_2 * g),
        Scheme::Detuned => {
            let denom = 2.0 * g * g - kappa * kappa / 16.0;
            if !(denom > 0.0) {
                return Err(Error::NoTransfer(format!(
                    "2G² − κ²/16 = {denom:e} is not positive"
                )));
            }
            PI * delta / denom
        }
        Scheme::Resonant => {
            let disc = 32.0 * g * g - kappa * kappa;
            if !(disc > 0.0) {
                return Err(Error::NoTransfer(format!(
                    "32G² − κ² = {disc:e} is not positive (overdamped)"
                )));
            }
            4.0 * PI / disc.sqrt()
        }
        Scheme::Beamsplitter => PI / (2.0 * g.abs()),
    };
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(Error::NoTransfer(format!("transfer time {t} is not a positive finite value")))
    }
}

/// Amplitudes of `scheme` at time `t`. Beam-splitter amplitudes are mapped
/// onto the subspace with c001 ← c01, c010 ← c10 and no photon; `g` is G₃ and
/// G₁ is taken as zero (it only contributes a global phase).
pub fn amplitudes(scheme: Scheme, t: f64, g: f64, delta: f64, kappa: f64) -> Result<SubspaceState> {
    match scheme {
        Scheme::Ideal => Ok(resonant_three_mode_amplitudes(t, g)),
        Scheme::Detuned => detuned_conditional_amplitudes(t, g, delta, kappa),
        Scheme::Resonant => resonant_conditional_amplitudes(t, g, kappa),
        Scheme::Beamsplitter => {
            let (c01, c10) = beamsplitter_amplitudes(t, 0.0, g, Frame::Rotating, None)?;
            Ok(SubspaceState::new(c01, c10, c(0.0)))
        }
    }
}

/// Evaluates fidelity and probability at the printed transfer time.
pub fn evaluate_transfer(scheme: Scheme, g: f64, delta: f64, kappa: f64) -> Result<TransferReport> {
    let time = transfer_time(scheme, g, delta, kappa)?;
    report_at(scheme, time, g, delta, kappa)
}

pub fn report_at(scheme: Scheme, time: f64, g: f64, delta: f64, kappa: f64) -> Result<TransferReport> {
    let state = amplitudes(scheme, time, g, delta, kappa)?;
    let (fidelity, probability) = fidelity_and_probability(&state)?;
    Ok(TransferReport {
        time,
        fidelity,
        probability,
        scheme,
    })
}

/// Local fidelity maximum nearest the printed transfer time.
///
/// Scans [0.5 t₀, 1.5 t₀] on a dense grid, takes the local maximum closest to
/// t₀ and polishes it with golden-section search.
pub fn locate_fidelity_maximum(scheme: Scheme, g: f64, delta: f64, kappa: f64) -> Result<TransferReport> {
    let t0 = transfer_time(scheme, g, delta, kappa)?;
    let fid = |t: f64| -> Result<f64> {
        let s = amplitudes(scheme, t, g, delta, kappa)?;
        Ok(fidelity_and_probability(&s)?.0)
    };
    let n = 2000;
    let (lo, hi) = (0.5 * t0, 1.5 * t0);
    let h = (hi - lo) / n as f64;
    let samples = (0..=n)
        .map(|i| fid(lo + i as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<usize> = None;
    for i in 1..n {
        if samples[i] >= samples[i - 1] && samples[i] >= samples[i + 1] {
            let closer = match best {
                None => true,
                Some(b) => ((lo + i as f64 * h) - t0).abs() < ((lo + b as f64 * h) - t0).abs(),
            };
            if closer {
                best = Some(i);
            }
        }
    }
    let i = best.ok_or_else(|| {
        Error::NoTransfer("no local fidelity maximum near the transfer time".into())
    })?;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo + (i - 1) as f64 * h, lo + (i + 1) as f64 * h);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (fid(x1)?, fid(x2)?);
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fid(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fid(x1)?;
        }
    }
    report_at(scheme, 0.5 * (a + b), g, delta, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::khz;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn close(a: &SubspaceState, b: &SubspaceState, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn ideal_initial_and_transfer() {
        let g = khz(50.0);
        assert_eq!(resonant_three_mode_amplitudes(0.0, g), SubspaceState::INITIAL);
        let s = resonant_three_mode_amplitudes(PI / (SQRT_2 * g), g);
        let target = SubspaceState::new(c(0.0), c(-1.0), c(0.0));
        assert!(close(&s, &target, 1e-12));
    }

    #[test]
    fn ideal_is_unitary() {
        let g = 1.3e5;
        for i in 0..1000 {
            let t = i as f64 * 1e-7;
            assert!((resonant_three_mode_amplitudes(t, g).norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn beamsplitter_cases() {
        let f = ModeFrequencies {
            omega_cav: 1e15,
            omega_m: khz(247.7),
            omega_phi: khz(2600.0),
        };
        let (g1, g3) = (khz(3.0), khz(25.0));
        let (a, b) = beamsplitter_amplitudes(0.0, g1, g3, Frame::Rotating, None).unwrap();
        assert_eq!((a, b), (c(1.0), c(0.0)));
        for i in 0..200 {
            let t = i as f64 * 1e-6;
            for frame in [Frame::Rotating, Frame::Lab] {
                let (a, b) = beamsplitter_amplitudes(t, g1, g3, frame, Some(&f)).unwrap();
                assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-14);
            }
        }
        let t = transfer_time(Scheme::Beamsplitter, g3, 0.0, 0.0).unwrap();
        let (_, b) = beamsplitter_amplitudes(t, g1, g3, Frame::Lab, Some(&f)).unwrap();
        assert!((b.norm() - 1.0).abs() < 1e-14);
        assert!(beamsplitter_amplitudes(t, g1, g3, Frame::Lab, None).is_err());
    }

    #[test]
    fn spectrum_hermitian_limit() {
        let g = khz(50.0);
        let s = conditional_spectrum(g, 0.0, 0.0);
        assert_relative_eq!(s.chi.re, 32f64.sqrt() * g, max_relative = 1e-14);
        assert_eq!(s.chi.im, 0.0);
        assert!((s.e2 + s.chi / 4.0).norm() < 1e-9);
        assert!((s.e3 - s.chi / 4.0).norm() < 1e-9);
    }

    #[test]
    fn spectrum_invariants_at_headline_point() {
        let (g, d, k) = (khz(50.0), khz(200.0), khz(75.2));
        let s = conditional_spectrum(g, d, k);
        let expected = Complex64::new(4.0 * d * d + 32.0 * g * g - k * k, 4.0 * d * k);
        assert!((s.chi * s.chi - expected).norm() / expected.norm() < 1e-12);
        let sum = -(Complex64::new(2.0 * d, k)) / 2.0;
        assert!((s.e2 + s.e3 - sum).norm() / sum.norm() < 1e-12);
    }

    #[test]
    fn spectrum_decays_on_grid() {
        for gi in 1..=10 {
            for di in 0..=10 {
                for ki in 1..=10 {
                    let (g, d, k) = (gi as f64 * 2e4, di as f64 * 3e4, ki as f64 * 1.5e4);
                    if 32.0 * g * g <= k * k {
                        continue;
                    }
                    let s = conditional_spectrum(g, d, k);
                    assert!(s.e2.im <= 1e-9 * g && s.e3.im <= 1e-9 * g, "{g} {d} {k}");
                }
            }
        }
    }

    #[test]
    fn detuned_initial_state() {
        let s = detuned_conditional_amplitudes(0.0, khz(50.0), khz(200.0), khz(75.2)).unwrap();
        assert!(close(&s, &SubspaceState::INITIAL, 1e-15));
    }

    #[test]
    fn detuned_headline() {
        let (g, d, k) = (khz(50.0), khz(200.0), khz(75.2));
        let r = evaluate_transfer(Scheme::Detuned, g, d, k).unwrap();
        assert!((r.fidelity - 0.95).abs() < 0.01, "F = {}", r.fidelity);
        assert!((r.probability - 0.68).abs() < 0.02, "P = {}", r.probability);
    }

    #[test]
    fn resonant_headline() {
        let (g, k) = (khz(50.0), khz(75.2));
        let r = evaluate_transfer(Scheme::Resonant, g, 0.0, k).unwrap();
        assert!((r.fidelity - 0.926).abs() < 0.003, "F = {}", r.fidelity);
        assert!((r.probability - 0.59).abs() < 0.01, "P = {}", r.probability);
    }

    #[test]
    fn detuned_zero_detuning_is_resonant() {
        let (g, k) = (khz(50.0), khz(75.2));
        for i in 0..1000 {
            let t = i as f64 * 1e-8;
            let a = detuned_conditional_amplitudes(t, g, 0.0, k).unwrap();
            let b = resonant_conditional_amplitudes(t, g, k).unwrap();
            assert!(close(&a, &b, 1e-12), "t = {t}");
        }
    }

    #[test]
    fn resonant_lossless_is_ideal() {
        let g = khz(50.0);
        for i in 0..1000 {
            let t = i as f64 * 1e-8;
            let a = resonant_conditional_amplitudes(t, g, 0.0).unwrap();
            let b = resonant_three_mode_amplitudes(t, g);
            assert!(close(&a, &b, 1e-12));
            assert_relative_eq!(a.c010.re, -0.5 + 0.5 * (SQRT_2 * g * t).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn resonant_overdamped_branch_is_real_valued() {
        let (g, k) = (khz(5.0), khz(75.2));
        let s = resonant_conditional_amplitudes(3e-5, g, k).unwrap();
        assert!(s.c001.im.abs() < 1e-12 && s.c010.im.abs() < 1e-12 && s.c100.re.abs() < 1e-12);
        assert!(s.norm_sqr() < 1.0);
    }

    #[test]
    fn resonant_exceptional_point_refused() {
        let k = khz(75.2);
        let g = k / 32f64.sqrt();
        assert!(matches!(
            resonant_conditional_amplitudes(1e-5, g, k),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn fidelity_basis_states() {
        let s = SubspaceState::new(c(0.0), c(1.0), c(0.0));
        assert_eq!(fidelity_and_probability(&s).unwrap(), (1.0, 1.0));
        assert_eq!(
            fidelity_and_probability(&SubspaceState::INITIAL).unwrap(),
            (0.0, 1.0)
        );
        let z = SubspaceState::new(c(0.0), c(0.0), c(0.0));
        assert!(matches!(fidelity_and_probability(&z), Err(Error::VanishedBranch(_))));
    }

    #[test]
    fn transfer_time_cases() {
        let g = khz(50.0);
        let t = transfer_time(Scheme::Resonant, g, 0.0, 0.0).unwrap();
        assert_relative_eq!(t, 4.0 * PI / (32f64.sqrt() * g), max_relative = 1e-15);
        assert_relative_eq!(t, transfer_time(Scheme::Ideal, g, 0.0, 0.0).unwrap(), max_relative = 1e-14);

        // evaluated directly: π·200/(2·50² − 75.2²/16) in units of 1/(2π kHz)
        let td = transfer_time(Scheme::Detuned, g, khz(200.0), khz(75.2)).unwrap();
        let direct = PI * 200.0 / (2.0 * 2500.0 - 75.2 * 75.2 / 16.0);
        assert_relative_eq!(td * khz(1.0), direct, max_relative = 1e-13);
        assert_relative_eq!(td * khz(1.0), 0.1352223, max_relative = 1e-6);

        let k = 32f64.sqrt() * g;
        assert!(matches!(transfer_time(Scheme::Resonant, g, 0.0, k), Err(Error::NoTransfer(_))));
        assert!(transfer_time(Scheme::Detuned, khz(1.0), khz(200.0), khz(75.2)).is_err());
    }

    #[test]
    fn resonant_fidelity_peak_coincides_with_printed_time() {
        let (g, k) = (khz(50.0), khz(75.2));
        let t0 = transfer_time(Scheme::Resonant, g, 0.0, k).unwrap();
        let m = locate_fidelity_maximum(Scheme::Resonant, g, 0.0, k).unwrap();
        assert!(((m.time - t0) / t0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn global_phase_invariance(theta in 0.0..(2.0 * PI), t in 0.0..5e-5f64) {
            let (g, d, k) = (khz(50.0), khz(200.0), khz(75.2));
            let s = detuned_conditional_amplitudes(t, g, d, k).unwrap();
            prop_assume!(s.norm_sqr() > 1e-6);
            let (f, p) = fidelity_and_probability(&s).unwrap();
            let (fr, pr) = fidelity_and_probability(&s.scale(Complex64::from_polar(1.0, theta))).unwrap();
            prop_assert!((f - fr).abs() < 1e-12 && (p - pr).abs() < 1e-12);
        }

        #[test]
        fn probability_never_exceeds_one(g in 1e3..1e6f64, d in 0.0..1e6f64, k in 0.0..1e6f64, x in 0.0..1.0f64) {
            let t = x * 20.0 / g;
            if let Ok(s) = detuned_conditional_amplitudes(t, g, d, k) {
                prop_assert!(s.norm_sqr() <= 1.0 + 1e-9);
            }
        }
    }
}
