//! Closed forms against numerical propagation of the conditional generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{self, conditional_spectrum, Scheme};
use crate::error::{Error, Result};
use crate::integrator::{build_subspace_generator, propagate, restore_photon_phase};
use crate::model::SubspaceState;
use crate::presets::{HEADLINE_DELTA_KHZ, HEADLINE_G_KHZ, HEADLINE_KAPPA_KHZ};
use crate::units::khz;

/// Seed of the random-tuple stream. Changing it changes which tuples are
/// tested, so it is fixed here rather than taken from the caller by default.
pub const DEFAULT_SEED: u64 = 0x1E71_5EED;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub random_tuples: usize,
    /// upper end of the uniform draw for G, δ, κ (rad/s)
    pub max_rate: f64,
    pub samples: usize,
    pub tolerance: f64,
    /// tuples with |χ| at or below this fraction of max(G, δ, κ) are redrawn
    pub degeneracy: f64,
    /// the horizon is capped at this many inverse-scale units, which bounds
    /// the accumulated phase when a tuple has G ≪ δ
    pub phase_budget: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            random_tuples: 100,
            max_rate: 1e6,
            samples: 201,
            tolerance: 1e-8,
            degeneracy: 1e-3,
            phase_budget: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCase {
    pub label: String,
    pub scheme: Scheme,
    pub g: f64,
    pub delta: f64,
    pub kappa: f64,
    pub t_end: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub seed: u64,
    pub cases: Vec<OracleCase>,
    pub redrawn: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Largest amplitude difference on an evenly spaced grid over [0, t_end].
///
/// The propagated photon amplitude is rotated back by e^{−iδt} before the
/// comparison.
pub fn max_deviation(scheme: Scheme, g: f64, delta: f64, kappa: f64, t_end: f64, samples: usize) -> Result<f64> {
    if samples < 2 || !(t_end > 0.0) {
        return Err(Error::InvalidInput("need at least two samples over a positive span".into()));
    }
    let frame_delta = if scheme == Scheme::Detuned { delta } else { 0.0 };
    let gen = build_subspace_generator(scheme, g, delta, kappa)?;
    let grid: Vec<f64> = (0..samples)
        .map(|i| t_end * i as f64 / (samples - 1) as f64)
        .collect();
    let initial = SubspaceState::INITIAL.as_array();
    let run = propagate(&gen, &initial, &grid, 1e-12)?;
    let mut worst: f64 = 0.0;
    for (t, s) in grid.iter().zip(&run.states) {
        let numeric = SubspaceState::from_slice(&restore_photon_phase(s, frame_delta, *t));
        let closed = analytic::amplitudes(scheme, *t, g, delta, kappa)?;
        worst = worst.max(numeric.max_abs_diff(&closed));
    }
    Ok(worst)
}

fn horizon(scheme: Scheme, g: f64, delta: f64, kappa: f64, budget: f64) -> f64 {
    let scale = g.max(delta).max(kappa);
    let cap = budget / scale;
    // twice the printed transfer time where one exists, else the cap
    match analytic::transfer_time(scheme, g, delta, kappa) {
        Ok(t) => (2.0 * t).min(cap),
        Err(_) => cap,
    }
}

/// The two headline points followed by the seeded random tuples (detuned
/// scheme, components uniform in [0, max_rate]).
pub fn run_oracle(config: &OracleConfig) -> Result<OracleSummary> {
    let mut cases = Vec::new();
    let (g, d, k) = (khz(HEADLINE_G_KHZ), khz(HEADLINE_DELTA_KHZ), khz(HEADLINE_KAPPA_KHZ));
    for (label, scheme, delta) in [("detuned headline", Scheme::Detuned, d), ("resonant headline", Scheme::Resonant, 0.0)] {
        let t_end = 2.0 * analytic::transfer_time(scheme, g, delta, k)?;
        cases.push(OracleCase {
            label: label.into(),
            scheme,
            g,
            delta,
            kappa: k,
            t_end,
            max_deviation: max_deviation(scheme, g, delta, k, t_end, config.samples)?,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut redrawn = 0;
    let mut drawn = 0;
    while drawn < config.random_tuples {
        let g = rng.random_range(0.0..=config.max_rate);
        let delta = rng.random_range(0.0..=config.max_rate);
        let kappa = rng.random_range(0.0..=config.max_rate);
        let scale = g.max(delta).max(kappa);
        if !(scale > 0.0) || conditional_spectrum(g, delta, kappa).chi.norm() <= config.degeneracy * scale {
            redrawn += 1;
            continue;
        }
        drawn += 1;
        let t_end = horizon(Scheme::Detuned, g, delta, kappa, config.phase_budget);
        cases.push(OracleCase {
            label: format!("random #{drawn}"),
            scheme: Scheme::Detuned,
            g,
            delta,
            kappa,
            t_end,
            max_deviation: max_deviation(Scheme::Detuned, g, delta, kappa, t_end, config.samples)?,
        });
    }

    let max_deviation = cases.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    Ok(OracleSummary {
        seed: config.seed,
        cases,
        redrawn,
        max_deviation,
        tolerance: config.tolerance,
        passed: max_deviation <= config.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headline_points_agree() {
        let summary = run_oracle(&OracleConfig {
            random_tuples: 0,
            ..OracleConfig::default()
        })
        .unwrap();
        assert_eq!(summary.cases.len(), 2);
        assert!(summary.passed, "{}", summary.max_deviation);
    }

    #[test]
    fn seeded_stream_is_reproducible() {
        let cfg = OracleConfig {
            random_tuples: 5,
            samples: 11,
            ..OracleConfig::default()
        };
        let a = run_oracle(&cfg).unwrap();
        let b = run_oracle(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn horizon_is_capped_for_slow_transfer() {
        let t = horizon(Scheme::Detuned, 1.0, 1e6, 0.0, 1e3);
        assert_eq!(t, 1e3 / 1e6);
    }
}
