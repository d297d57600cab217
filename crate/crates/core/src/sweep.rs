//! Fidelity/probability grids over two of (G, δ, κ).

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Scheme, TransferReport};
use crate::error::{Error, Result};
use crate::units::from_angular;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "G")]
    G,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "kappa")]
    Kappa,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::G => "G",
            SweepParam::Delta => "delta",
            SweepParam::Kappa => "kappa",
        }
    }
}

/// Linearly spaced axis; bounds in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            // land exactly on the upper bound
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluateAt {
    /// printed transfer-time formula
    #[default]
    PrintedFormula,
    /// numerically located fidelity maximum near that time
    FidelityMaximum,
}

/// Values of the parameters that are not swept (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub g: f64,
    pub delta: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub name: String,
    pub scheme: Scheme,
    pub axis1: Axis,
    pub axis2: Axis,
    pub fixed: FixedParams,
    pub evaluate_at: EvaluateAt,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.scheme, Scheme::Detuned | Scheme::Resonant) {
            return Err(Error::Spec(format!("sweeps support detuned and resonant, not {}", self.scheme.name())));
        }
        if self.axis1.param == self.axis2.param {
            return Err(Error::Spec(format!("both axes sweep {}", self.axis1.param.name())));
        }
        for axis in [&self.axis1, &self.axis2] {
            let n = axis.param.name();
            if axis.count < 2 {
                return Err(Error::Spec(format!("axis {n} needs at least 2 points")));
            }
            if !(axis.min.is_finite() && axis.max.is_finite()) || axis.min < 0.0 || axis.max < axis.min {
                return Err(Error::Spec(format!(
                    "axis {n} needs finite bounds 0 <= min <= max, got [{}, {}]",
                    axis.min, axis.max
                )));
            }
            if self.scheme == Scheme::Resonant && axis.param == SweepParam::Delta {
                return Err(Error::Spec("the resonant scheme has no δ to sweep".into()));
            }
        }
        let f = &self.fixed;
        if ![f.g, f.delta, f.kappa].iter().all(|v| v.is_finite()) {
            return Err(Error::Spec("fixed parameters must be finite".into()));
        }
        Ok(())
    }

    fn params_at(&self, i: usize, j: usize) -> (f64, f64, f64) {
        let (mut g, mut delta, mut kappa) = (self.fixed.g, self.fixed.delta, self.fixed.kappa);
        for (axis, k) in [(&self.axis1, i), (&self.axis2, j)] {
            let v = axis.value(k);
            match axis.param {
                SweepParam::G => g = v,
                SweepParam::Delta => delta = v,
                SweepParam::Kappa => kappa = v,
            }
        }
        (g, delta, kappa)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    NoTransfer,
    Degenerate,
    VanishedBranch,
    Failed(String),
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Ok => f.write_str("ok"),
            CellStatus::NoTransfer => f.write_str("no-transfer"),
            CellStatus::Degenerate => f.write_str("degenerate"),
            CellStatus::VanishedBranch => f.write_str("vanished-branch"),
            // keep the CSV field free of separators
            CellStatus::Failed(msg) => write!(f, "failed: {}", msg.replace([',', '\n', '\r'], ";")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    /// rad/s
    pub param1: f64,
    pub param2: f64,
    /// s; NaN when no transfer time exists
    pub time: f64,
    pub fidelity: f64,
    pub probability: f64,
    pub status: CellStatus,
}

/// Cells are row-major: axis1 index outer, axis2 index inner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub name: String,
    pub scheme: Scheme,
    pub axis1: Axis,
    pub axis2: Axis,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.axis2.count + j]
    }
}

fn evaluate_cell(spec: &SweepSpec, idx: usize) -> SweepCell {
    let (i, j) = (idx / spec.axis2.count, idx % spec.axis2.count);
    let (g, delta, kappa) = spec.params_at(i, j);
    let outcome: Result<TransferReport> = match spec.evaluate_at {
        EvaluateAt::PrintedFormula => analytic::evaluate_transfer(spec.scheme, g, delta, kappa),
        EvaluateAt::FidelityMaximum => analytic::locate_fidelity_maximum(spec.scheme, g, delta, kappa),
    };
    let (time, fidelity, probability, status) = match outcome {
        Ok(r) => (r.time, r.fidelity.min(1.0), r.probability, CellStatus::Ok),
        Err(e) => {
            let status = match e {
                Error::NoTransfer(_) => CellStatus::NoTransfer,
                Error::DegenerateSpectrum { .. } => CellStatus::Degenerate,
                Error::VanishedBranch(_) => CellStatus::VanishedBranch,
                other => CellStatus::Failed(other.to_string()),
            };
            (f64::NAN, f64::NAN, f64::NAN, status)
        }
    };
    SweepCell {
        param1: spec.axis1.value(i),
        param2: spec.axis2.value(j),
        time,
        fidelity,
        probability,
        status,
    }
}

fn assemble(spec: &SweepSpec, cells: Vec<SweepCell>) -> SweepResult {
    SweepResult {
        name: spec.name.clone(),
        scheme: spec.scheme,
        axis1: spec.axis1,
        axis2: spec.axis2,
        cells,
    }
}

/// Evaluates every cell with the closed forms. Each cell is independent, so
/// the result does not depend on evaluation order or thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let n = spec.axis1.count * spec.axis2.count;
    #[cfg(feature = "parallel")]
    let cells = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(|k| evaluate_cell(spec, k)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells = (0..n).map(|k| evaluate_cell(spec, k)).collect();
    Ok(assemble(spec, cells))
}

/// As [`run_sweep`], on a dedicated pool of `threads` workers.
#[cfg(feature = "parallel")]
pub fn run_sweep_on(spec: &SweepSpec, threads: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

/// Single-threaded reference evaluation.
pub fn run_sweep_serial(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let n = spec.axis1.count * spec.axis2.count;
    Ok(assemble(spec, (0..n).map(|k| evaluate_cell(spec, k)).collect()))
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        // 12 significant digits
        format!("{v:.11e}")
    }
}

/// CSV with columns `<axis1>_khz,<axis2>_khz,t,F,P,status`; axis values in
/// cyclic kHz, t in seconds, '\n' line endings.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{}_khz,{}_khz,t,F,P,status",
        result.axis1.param.name(),
        result.axis2.param.name()
    )?;
    for c in &result.cells {
        write!(
            out,
            "{},{},{},{},{},{}\n",
            num(from_angular(c.param1) / 1e3),
            num(from_angular(c.param2) / 1e3),
            num(c.time),
            num(c.fidelity),
            num(c.probability),
            c.status
        )?;
    }
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::khz;

    fn axis(param: SweepParam, lo: f64, hi: f64, count: usize) -> Axis {
        Axis {
            param,
            min: khz(lo),
            max: khz(hi),
            count,
        }
    }

    fn detuned_spec() -> SweepSpec {
        SweepSpec {
            name: "t".into(),
            scheme: Scheme::Detuned,
            axis1: axis(SweepParam::G, 40.0, 50.0, 2),
            axis2: axis(SweepParam::Delta, 200.0, 220.0, 2),
            fixed: FixedParams {
                g: 0.0,
                delta: 0.0,
                kappa: khz(75.2),
            },
            evaluate_at: EvaluateAt::PrintedFormula,
        }
    }

    #[test]
    fn small_detuned_grid_contains_headline_cell() {
        let r = run_sweep(&detuned_spec()).unwrap();
        assert_eq!(r.cells.len(), 4);
        let c = r.cell(1, 0);
        assert_eq!(c.param1, khz(50.0));
        assert!((c.fidelity - 0.95).abs() < 0.01 && (c.probability - 0.68).abs() < 0.02);
    }

    #[test]
    fn resonant_headline_cell() {
        let spec = SweepSpec {
            scheme: Scheme::Resonant,
            axis1: axis(SweepParam::G, 50.0, 60.0, 2),
            axis2: axis(SweepParam::Kappa, 75.2, 80.0, 2),
            ..detuned_spec()
        };
        let c = run_sweep(&spec).unwrap().cell(0, 0).clone();
        assert!((c.fidelity - 0.926).abs() < 0.003 && (c.probability - 0.59).abs() < 0.01);
    }

    #[test]
    fn overdamped_cells_are_flagged() {
        let spec = SweepSpec {
            scheme: Scheme::Resonant,
            axis1: axis(SweepParam::G, 1.0, 50.0, 2),
            axis2: axis(SweepParam::Kappa, 75.2, 80.0, 2),
            ..detuned_spec()
        };
        let r = run_sweep(&spec).unwrap();
        for c in &r.cells {
            // 32G² ≤ κ² for G = 1 kHz
            if c.param1 == khz(1.0) {
                assert_eq!(c.status, CellStatus::NoTransfer);
                assert!(c.fidelity.is_nan());
            }
            assert_eq!(c.fidelity.is_nan(), c.status != CellStatus::Ok);
        }
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let mut s = detuned_spec();
        s.axis2.param = SweepParam::G;
        assert!(matches!(run_sweep(&s), Err(Error::Spec(_))));
        let mut s = detuned_spec();
        s.axis1.count = 1;
        assert!(matches!(run_sweep(&s), Err(Error::Spec(_))));
        let mut s = detuned_spec();
        s.scheme = Scheme::Resonant;
        assert!(matches!(run_sweep(&s), Err(Error::Spec(_))));
        let mut s = detuned_spec();
        s.axis1.min = -1.0;
        assert!(matches!(run_sweep(&s), Err(Error::Spec(_))));
    }

    #[test]
    fn parallel_matches_serial_bytes() {
        let mut s = detuned_spec();
        s.axis1.count = 9;
        s.axis2.count = 7;
        let a = to_csv_string(&run_sweep(&s).unwrap());
        let b = to_csv_string(&run_sweep_serial(&s).unwrap());
        assert_eq!(a, b);
        assert!(!a.contains('\r'));
        assert_eq!(a.lines().count(), 1 + 63);
        assert!(a.starts_with("G_khz,delta_khz,t,F,P,status\n"));
    }

    #[test]
    fn numbers_have_twelve_significant_digits() {
        assert_eq!(num(50.0), "5.00000000000e1");
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn failed_status_is_csv_safe() {
        let s = CellStatus::Failed("a, b\nc".into()).to_string();
        assert!(!s.contains(',') && !s.contains('\n'));
    }
}
