//! JSON configuration: physical setup, optional drives, optional sweeps.
//!
//! Lengths in metres, the orientation in degrees, frequencies in cyclic Hz
//! (sweep axes in cyclic kHz). Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::analytic::Scheme;
use crate::error::{Error, Result, Violation};
use crate::model::{validate_setup, CavitySpec, ModeFrequencies, ParticlePose, ParticleSpec, PhysicalSetup};
use crate::physics::{DrivePair, Sideband};
use crate::sweep::{Axis, EvaluateAt, FixedParams, SweepParam, SweepSpec};
use crate::units::{khz, to_angular};

pub const DEFAULT_SWEEP_COUNT: usize = 64;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseFile {
    x: f64,
    y: f64,
    z: f64,
    phi_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreqsFile {
    omega_m: f64,
    omega_phi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DrivesFile {
    rabi1_hz: f64,
    rabi2_hz: f64,
    delta_hz: f64,
    sideband: Sideband,
}

fn default_count() -> usize {
    DEFAULT_SWEEP_COUNT
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisFile {
    param: SweepParam,
    min_khz: f64,
    max_khz: f64,
    #[serde(default = "default_count")]
    count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixedFile {
    #[serde(rename = "G")]
    g: Option<f64>,
    delta: Option<f64>,
    kappa: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    name: String,
    scheme: Scheme,
    axis1: AxisFile,
    axis2: AxisFile,
    #[serde(default)]
    fixed_khz: FixedFile,
    #[serde(default)]
    evaluate_at: EvaluateAt,
}

/// How the two axis lengths in the file are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisConvention {
    #[default]
    Semi,
    /// the lengths are full axes and are halved on load
    Full,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    density: f64,
    #[serde(default)]
    axes: AxisConvention,
    semi_axis_long: f64,
    semi_axis_short: f64,
    rel_permittivity: f64,
    cavity_length: f64,
    wavelength: f64,
    finesse: f64,
    pose: PoseFile,
    freqs_hz: FreqsFile,
    #[serde(default)]
    drives: Option<DrivesFile>,
    #[serde(default)]
    sweeps: Vec<SweepFile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub setup: PhysicalSetup,
    /// absent means derive-only mode
    pub drives: Option<DrivePair>,
    pub sweeps: Vec<SweepSpec>,
    pub warnings: Vec<String>,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

/// Parses and validates; `origin` only labels error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<LoadedConfig> {
    let raw: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let cavity = CavitySpec::new(raw.cavity_length, raw.wavelength, raw.finesse);
    let scale = match raw.axes {
        AxisConvention::Semi => 1.0,
        AxisConvention::Full => 0.5,
    };
    let setup = PhysicalSetup {
        particle: ParticleSpec {
            density: raw.density,
            semi_axis_long: scale * raw.semi_axis_long,
            semi_axis_short: scale * raw.semi_axis_short,
            rel_permittivity: raw.rel_permittivity,
        },
        cavity,
        pose: ParticlePose::new(raw.pose.x, raw.pose.y, raw.pose.z, raw.pose.phi_deg.to_radians()),
        freqs: ModeFrequencies {
            omega_cav: cavity.omega(),
            omega_m: to_angular(raw.freqs_hz.omega_m),
            omega_phi: to_angular(raw.freqs_hz.omega_phi),
        },
    };

    let mut violations = match validate_setup(setup) {
        Ok(_) => Vec::new(),
        Err(v) => v,
    };
    let drives = raw.drives.map(|d| {
        for (field, v) in [("drives.rabi1_hz", d.rabi1_hz), ("drives.rabi2_hz", d.rabi2_hz)] {
            if !(v.is_finite() && v >= 0.0) {
                violations.push(Violation::new(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !d.delta_hz.is_finite() {
            violations.push(Violation::new("drives.delta_hz", format!("must be finite, got {}", d.delta_hz)));
        }
        DrivePair {
            rabi1: to_angular(d.rabi1_hz),
            rabi2: to_angular(d.rabi2_hz),
            delta: to_angular(d.delta_hz),
            sideband: d.sideband,
        }
    });
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }

    let sweeps = raw
        .sweeps
        .into_iter()
        .map(build_sweep)
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedConfig {
        setup,
        drives,
        sweeps,
        warnings: setup.warnings(),
    })
}

fn build_sweep(s: SweepFile) -> Result<SweepSpec> {
    let axis = |a: &AxisFile| Axis {
        param: a.param,
        min: khz(a.min_khz),
        max: khz(a.max_khz),
        count: a.count,
    };
    let (axis1, axis2) = (axis(&s.axis1), axis(&s.axis2));
    let swept = |p: SweepParam| axis1.param == p || axis2.param == p;
    let fixed = |p: SweepParam, v: Option<f64>| -> Result<f64> {
        match v {
            _ if swept(p) => Ok(0.0),
            Some(x) => Ok(khz(x)),
            // the resonant scheme never reads δ
            None if p == SweepParam::Delta && s.scheme == Scheme::Resonant => Ok(0.0),
            None => Err(Error::Spec(format!(
                "sweep `{}` needs fixed_khz.{} because it is not an axis",
                s.name,
                p.name()
            ))),
        }
    };
    let spec = SweepSpec {
        fixed: FixedParams {
            g: fixed(SweepParam::G, s.fixed_khz.g)?,
            delta: fixed(SweepParam::Delta, s.fixed_khz.delta)?,
            kappa: fixed(SweepParam::Kappa, s.fixed_khz.kappa)?,
        },
        name: s.name,
        scheme: s.scheme,
        axis1,
        axis2,
        evaluate_at: s.evaluate_at,
    };
    spec.validate()?;
    Ok(spec)
}
