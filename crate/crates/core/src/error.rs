use std::fmt;

use thiserror::Error;

/// A single failed invariant found while validating input.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub reason: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid setup: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero denominator: drive detuning and cavity decay are both zero")]
    ZeroDenominator,

    #[error("resonant denominator in term `{term}` (|value| = {value:e} rad/s)")]
    ResonantDenominator { term: &'static str, value: f64 },

    #[error("G1 and G2 are both zero")]
    BothZero,

    #[error("no drive strength balances G1 against G2 in [0, {limit:e}] rad/s")]
    NoBalance { limit: f64 },

    #[error("degenerate spectrum (|chi| = {chi_abs:e}); use the numerical propagator")]
    DegenerateSpectrum { chi_abs: f64 },

    #[error("no transfer: {0}")]
    NoTransfer(String),

    #[error("branch norm vanished (P = {0:e})")]
    VanishedBranch(f64),

    #[error("step size underflow at t = {t:e} s (h = {h:e} s)")]
    StepFailure { t: f64, h: f64 },

    #[error("Fock dimension {dim} exceeds the limit of {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("fit diverged: {0}")]
    FitDiverged(String),

    #[error("sweep spec: {0}")]
    Spec(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure is a numerical one (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroDenominator
                | Error::ResonantDenominator { .. }
                | Error::BothZero
                | Error::NoBalance { .. }
                | Error::DegenerateSpectrum { .. }
                | Error::NoTransfer(_)
                | Error::VanishedBranch(_)
                | Error::StepFailure { .. }
                | Error::FitDiverged(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
