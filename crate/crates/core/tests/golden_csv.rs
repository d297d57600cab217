//! Byte-for-byte regression of a small sweep against a checked-in CSV.
//! Regenerate with `LEVI_BLESS=1 cargo test -p levi-core --test golden_csv`.

use std::path::PathBuf;

use levi_core::analytic::Scheme;
use levi_core::sweep::{run_sweep, to_csv_string, Axis, EvaluateAt, FixedParams, SweepParam, SweepSpec};
use levi_core::units::khz;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check(name: &str, spec: &SweepSpec) {
    let csv = to_csv_string(&run_sweep(spec).unwrap());
    let path = golden(name);
    if std::env::var_os("LEVI_BLESS").is_some() {
        std::fs::write(&path, &csv).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("golden file present");
    assert!(csv == expected, "{name} drifted from its golden file");
}

fn axis(param: SweepParam, min_khz: f64, max_khz: f64, count: usize) -> Axis {
    Axis { param, min: khz(min_khz), max: khz(max_khz), count }
}

#[test]
fn detuned_grid_matches_golden() {
    check(
        "detuned_5x4.csv",
        &SweepSpec {
            name: "detuned".into(),
            scheme: Scheme::Detuned,
            axis1: axis(SweepParam::G, 10.0, 90.0, 5),
            axis2: axis(SweepParam::Delta, 50.0, 350.0, 4),
            fixed: FixedParams { g: 0.0, delta: 0.0, kappa: khz(75.2) },
            evaluate_at: EvaluateAt::PrintedFormula,
        },
    );
}

#[test]
fn resonant_grid_with_overdamped_cells_matches_golden() {
    check(
        "resonant_4x4.csv",
        &SweepSpec {
            name: "resonant".into(),
            scheme: Scheme::Resonant,
            axis1: axis(SweepParam::G, 5.0, 50.0, 4),
            axis2: axis(SweepParam::Kappa, 75.2, 300.0, 4),
            fixed: FixedParams { g: 0.0, delta: 0.0, kappa: 0.0 },
            evaluate_at: EvaluateAt::PrintedFormula,
        },
    );
}
