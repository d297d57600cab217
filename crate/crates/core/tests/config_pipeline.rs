use std::path::Path;

use levi_core::config::load_config;
use levi_core::physics::{bare_couplings, derive_rates};
use levi_core::presets::{reference_drives, reference_setup};
use levi_core::sweep::{run_sweep_serial, SweepParam};
use levi_core::units::khz;

fn shipped() -> levi_core::config::LoadedConfig {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper_params.json");
    load_config(p).expect("shipped config loads")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn shipped_config_reproduces_presets() {
    let cfg = shipped();
    let ours = bare_couplings(&cfg.setup).unwrap();
    let reference = bare_couplings(&reference_setup()).unwrap();
    assert!(rel(ours.g_ab, reference.g_ab) < 1e-12);
    assert!(rel(ours.g_ac, reference.g_ac) < 1e-12);
    assert!(rel(ours.kappa, reference.kappa) < 1e-12);

    let d = cfg.drives.expect("drives block present");
    let a = derive_rates(&cfg.setup, &d).unwrap();
    let b = derive_rates(&reference_setup(), &reference_drives()).unwrap();
    assert!(rel(a.g3, b.g3) < 1e-10);
}

#[test]
fn shipped_sweeps_cover_both_schemes() {
    let cfg = shipped();
    assert_eq!(cfg.sweeps.len(), 2);
    let det = cfg.sweeps.iter().find(|s| s.name == "detuned-G-delta").unwrap();
    assert_eq!((det.axis1.param, det.axis2.param), (SweepParam::G, SweepParam::Delta));
    assert_eq!((det.axis1.count, det.axis2.count), (64, 64));
    let res = cfg.sweeps.iter().find(|s| s.name == "resonant-G-kappa").unwrap();
    assert_eq!(res.axis2.param, SweepParam::Kappa);
}

#[test]
fn detuned_sweep_contains_headline_neighbourhood() {
    let cfg = shipped();
    let mut spec = cfg.sweeps.into_iter().find(|s| s.name == "detuned-G-delta").unwrap();
    spec.axis1.count = 30; // G = 5, 10, ..., 150
    spec.axis2.count = 10; // δ = 50, 100, ..., 500
    let r = run_sweep_serial(&spec).unwrap();
    let c = r.cell(9, 3); // G = 50, δ = 200
    assert!(rel(c.param1, khz(50.0)) < 1e-12 && rel(c.param2, khz(200.0)) < 1e-12);
    assert!((c.fidelity - 0.95).abs() < 0.01, "{}", c.fidelity);
    assert!((c.probability - 0.68).abs() < 0.02, "{}", c.probability);
}
