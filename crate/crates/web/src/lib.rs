//! wasm-bindgen front for the browser demo in `www/`.
//!
//! Rates cross the boundary in cyclic kHz; times come back in seconds.

use wasm_bindgen::prelude::*;

use levi_core::analytic::{self, Scheme};
use levi_core::claims::claims_report;
use levi_core::config::parse_config;
use levi_core::physics::{bare_couplings, derive_rates};
use levi_core::sweep::{run_sweep_serial, Axis, EvaluateAt, FixedParams, SweepParam, SweepSpec};
use levi_core::units::{from_angular, khz};
use levi_core::Error;

fn js(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn scheme(name: &str) -> Result<Scheme, JsValue> {
    match name.parse::<Scheme>().map_err(js)? {
        s @ (Scheme::Detuned | Scheme::Resonant) => Ok(s),
        other => Err(JsValue::from_str(&format!("the demo plots detuned or resonant, not {}", other.name()))),
    }
}

/// Samples F(t) and P(t) on [0, 2·t_transfer]; returns
/// `[t_transfer, t0, F0, P0, t1, F1, P1, ...]`.
pub fn transfer_curve_native(
    scheme_name: &str,
    g_khz: f64,
    delta_khz: f64,
    kappa_khz: f64,
    steps: usize,
) -> Result<Vec<f64>, Error> {
    let s = scheme_name.parse::<Scheme>()?;
    let (g, d, k) = (khz(g_khz), khz(delta_khz), khz(kappa_khz));
    let t_star = analytic::transfer_time(s, g, d, k)?;
    let steps = steps.max(1);
    let mut out = Vec::with_capacity(1 + 3 * (steps + 1));
    out.push(t_star);
    for i in 0..=steps {
        let t = 2.0 * t_star * i as f64 / steps as f64;
        let state = analytic::amplitudes(s, t, g, d, k)?;
        // F is undefined once the branch has vanished; plot it as NaN
        let (f, p) = analytic::fidelity_and_probability(&state).unwrap_or((f64::NAN, state.norm_sqr()));
        out.extend([t, f, p]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn transfer_curve(
    scheme_name: &str,
    g_khz: f64,
    delta_khz: f64,
    kappa_khz: f64,
    steps: usize,
) -> Result<Vec<f64>, JsValue> {
    scheme(scheme_name)?;
    transfer_curve_native(scheme_name, g_khz, delta_khz, kappa_khz, steps).map_err(js)
}

/// F at the transfer time over a G × (δ or κ) grid, row-major in G.
/// Detuned grids sweep δ with κ fixed, resonant grids sweep κ.
/// Cells without a transfer are NaN.
pub fn fidelity_map_native(
    scheme_name: &str,
    g_min_khz: f64,
    g_max_khz: f64,
    x_min_khz: f64,
    x_max_khz: f64,
    fixed_khz: f64,
    n: usize,
) -> Result<Vec<f64>, Error> {
    let s = scheme_name.parse::<Scheme>()?;
    let second = if s == Scheme::Resonant { SweepParam::Kappa } else { SweepParam::Delta };
    let spec = SweepSpec {
        name: "demo".into(),
        scheme: s,
        axis1: Axis { param: SweepParam::G, min: khz(g_min_khz), max: khz(g_max_khz), count: n },
        axis2: Axis { param: second, min: khz(x_min_khz), max: khz(x_max_khz), count: n },
        fixed: FixedParams { g: 0.0, delta: 0.0, kappa: khz(fixed_khz) },
        evaluate_at: EvaluateAt::PrintedFormula,
    };
    Ok(run_sweep_serial(&spec)?.cells.iter().map(|c| c.fidelity).collect())
}

#[wasm_bindgen]
pub fn fidelity_map(
    scheme_name: &str,
    g_min_khz: f64,
    g_max_khz: f64,
    x_min_khz: f64,
    x_max_khz: f64,
    fixed_khz: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    scheme(scheme_name)?;
    if n > 256 {
        return Err(JsValue::from_str("grid side is capped at 256"));
    }
    fidelity_map_native(scheme_name, g_min_khz, g_max_khz, x_min_khz, x_max_khz, fixed_khz, n).map_err(js)
}

/// Couplings, rates and the claims table for a configuration given as JSON text.
pub fn derive_report_native(config_json: &str) -> Result<String, Error> {
    let cfg = parse_config(config_json, "<browser>")?;
    let bare = bare_couplings(&cfg.setup)?;
    let rates = cfg.drives.as_ref().map(|d| derive_rates(&cfg.setup, d)).transpose()?;
    let claims = claims_report(&cfg.setup, cfg.drives.as_ref())?;
    let v = serde_json::json!({
        "g_ab_rad_s": bare.g_ab,
        "g_ac_rad_s": bare.g_ac,
        "kappa_over_2pi_khz": from_angular(bare.kappa) / 1e3,
        "g3_over_2pi_hz": rates.map(|r| from_angular(r.g3)),
        "claims": claims,
        "warnings": cfg.warnings,
    });
    Ok(serde_json::to_string_pretty(&v).expect("report serializes"))
}

#[wasm_bindgen]
pub fn derive_report(config_json: &str) -> Result<String, JsValue> {
    derive_report_native(config_json).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_starts_in_librational_mode() {
        let v = transfer_curve_native("detuned", 50.0, 200.0, 75.2, 10).unwrap();
        assert_eq!(v.len(), 1 + 3 * 11);
        assert_eq!((v[1], v[3]), (0.0, 1.0));
        assert!(v[2].abs() < 1e-15);
        // sample 5 sits at the transfer time
        assert!((v[16] - v[0]).abs() < 1e-18);
        assert!((v[17] - 0.95).abs() < 0.01);
    }

    #[test]
    fn map_marks_overdamped_cells() {
        let m = fidelity_map_native("resonant", 1.0, 150.0, 10.0, 300.0, 0.0, 8).unwrap();
        assert_eq!(m.len(), 64);
        assert!(m[7].is_nan()); // G = 1 kHz, κ = 300 kHz
        assert!(m.iter().filter(|f| f.is_finite()).all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn report_from_shipped_config() {
        let text = include_str!("../../../configs/paper_params.json");
        let v: serde_json::Value = serde_json::from_str(&derive_report_native(text).unwrap()).unwrap();
        assert!((v["kappa_over_2pi_khz"].as_f64().unwrap() - 74.948).abs() < 1e-3);
        assert!(v["claims"]["rows"].as_array().unwrap().len() > 10);
    }

    #[test]
    fn report_rejects_unknown_keys() {
        let err = derive_report_native(r#"{"densty": 1}"#).unwrap_err();
        assert!(err.to_string().contains("densty"));
    }
}
