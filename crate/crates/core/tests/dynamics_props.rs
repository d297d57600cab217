use num_complex::Complex64;
use proptest::prelude::*;

use levi_core::analytic::{self, Scheme};
use levi_core::integrator::{
    build_fock_model, build_subspace_generator, propagate_with, restore_photon_phase, FockModel, Method,
};
use levi_core::model::SubspaceState;

fn rk_deviation(scheme: Scheme, g: f64, delta: f64, kappa: f64, t_end: f64) -> f64 {
    let gen = build_subspace_generator(scheme, g, delta, kappa).unwrap();
    let grid: Vec<f64> = (0..41).map(|i| t_end * i as f64 / 40.0).collect();
    let run = propagate_with(&gen, &SubspaceState::INITIAL.as_array(), &grid, 1e-12, Method::RungeKutta).unwrap();
    let fd = if scheme == Scheme::Detuned { delta } else { 0.0 };
    grid.iter()
        .zip(&run.states)
        .map(|(&t, s)| {
            let num = SubspaceState::from_slice(&restore_photon_phase(s, fd, t));
            num.max_abs_diff(&analytic::amplitudes(scheme, t, g, delta, kappa).unwrap())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detuned_closed_form_matches_runge_kutta(g in 0.05f64..1.0, delta in 0.0f64..1.0, kappa in 0.0f64..1.0) {
        let chi = analytic::conditional_spectrum(g, delta, kappa).chi;
        prop_assume!(chi.norm() > 1e-2);
        let dev = rk_deviation(Scheme::Detuned, g, delta, kappa, 20.0);
        prop_assert!(dev < 1e-8, "deviation {dev:e}");
    }

    #[test]
    fn resonant_closed_form_matches_runge_kutta(g in 0.05f64..1.0, kappa in 0.0f64..1.0) {
        prop_assume!((32.0 * g * g - kappa * kappa).abs() > 1e-2);
        let dev = rk_deviation(Scheme::Resonant, g, 0.0, kappa, 20.0);
        prop_assert!(dev < 1e-8, "deviation {dev:e}");
    }

    #[test]
    fn conditional_norm_never_grows(g in 0.05f64..1.0, delta in 0.0f64..1.0, kappa in 0.0f64..1.0) {
        prop_assume!(analytic::conditional_spectrum(g, delta, kappa).chi.norm() > 1e-2);
        let mut last = 1.0;
        for k in 0..=50 {
            let n = analytic::amplitudes(Scheme::Detuned, k as f64 * 0.4, g, delta, kappa).unwrap().norm_sqr();
            prop_assert!(n <= last + 1e-12);
            last = n;
        }
    }

    #[test]
    fn single_excitation_block_is_the_subspace_generator(g in -1.0f64..1.0, delta in -1.0f64..1.0, kappa in 0.0f64..1.0) {
        let fock = build_fock_model(&FockModel::LinearizedThreeMode { g_b: g, g_c: g, delta, kappa }, &[2, 2, 2]).unwrap();
        let sub = build_subspace_generator(Scheme::Detuned, g, delta, kappa).unwrap();
        for (i, li) in sub.basis_labels.iter().enumerate() {
            for (j, lj) in sub.basis_labels.iter().enumerate() {
                let a = fock.entries[(fock.index_of(li).unwrap(), fock.index_of(lj).unwrap())];
                prop_assert_eq!(a, sub.entries[(i, j)]);
            }
        }
    }
}

#[test]
fn lossless_beamsplitter_swaps_populations_at_quarter_period() {
    let g3 = 2.0;
    let gen = build_fock_model(&FockModel::BeamSplitter { g1: 0.0, g2: 0.0, g3 }, &[1, 1]).unwrap();
    let t = std::f64::consts::PI / (2.0 * g3);
    let mut psi = vec![Complex64::new(0.0, 0.0); 4];
    psi[1] = Complex64::new(1.0, 0.0); // b = 0, c = 1
    let run = propagate_with(&gen, &psi, &[0.0, t], 1e-12, Method::Exponential).unwrap();
    assert!((run.amplitude(1, &[1, 0]).unwrap().norm() - 1.0).abs() < 1e-12);
}
