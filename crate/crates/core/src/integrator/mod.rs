//! Numerical propagation of the conditional and Fock-space models.
//!
//! This is the independent check on the closed forms in [`crate::analytic`]:
//! nothing here calls into that module.

mod entanglement;
mod fit;
mod fock;
mod propagate;

pub use entanglement::{logarithmic_negativity, Bipartition};
pub use fit::{extract_effective_coupling, fit_pair_creation_rate, CouplingFit};
pub use fock::{build_fock_model, FockModel, MAX_FOCK_DIM};
pub use propagate::{propagate, propagate_with, Method, PropagationResult, StepStats};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analytic::Scheme;
use crate::error::{Error, Result};

/// Dense generator −iH of i dψ/dt = Hψ (rad/s, ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
    /// occupation per mode for each basis index
    pub basis_labels: Vec<Vec<usize>>,
}

impl GeneratorMatrix {
    /// Builds −iH from a Hamiltonian matrix.
    pub fn from_hamiltonian(h: DMatrix<Complex64>, basis_labels: Vec<Vec<usize>>) -> Self {
        let dim = h.nrows();
        debug_assert_eq!(dim, basis_labels.len());
        Self {
            dim,
            entries: h * Complex64::new(0.0, -1.0),
            basis_labels,
        }
    }

    pub fn hamiltonian(&self) -> DMatrix<Complex64> {
        &self.entries * Complex64::new(0.0, 1.0)
    }

    /// max |M + M†|, zero for a lossless generator.
    pub fn anti_hermitian_defect(&self) -> f64 {
        let sum = &self.entries + self.entries.adjoint();
        sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn index_of(&self, label: &[usize]) -> Option<usize> {
        self.basis_labels.iter().position(|l| l == label)
    }
}

/// Labels of the single-excitation subspace, in (a, b, c) occupation order.
pub const SUBSPACE_LABELS: [[usize; 3]; 3] = [[0, 0, 1], [0, 1, 0], [1, 0, 0]];

/// Conditional generator on (|0,01⟩, |0,10⟩, |1,00⟩).
///
/// The explicit e^{∓iδt} of the detuned coupling is removed by the frame
/// shift C₃ = e^{−iδt} D on the photon amplitude, which puts −δ − iκ/2 on
/// the photon diagonal. Amplitudes in the original frame are recovered with
/// [`restore_photon_phase`].
pub fn build_subspace_generator(scheme: Scheme, g: f64, delta: f64, kappa: f64) -> Result<GeneratorMatrix> {
    let (delta, kappa) = match scheme {
        Scheme::Detuned => (delta, kappa),
        Scheme::Resonant => (0.0, kappa),
        Scheme::Ideal => (0.0, 0.0),
        Scheme::Beamsplitter => {
            return Err(Error::InvalidInput(
                "the beam-splitter scheme has no cavity subspace generator".into(),
            ))
        }
    };
    if !(g.is_finite() && delta.is_finite() && kappa.is_finite()) {
        return Err(Error::InvalidInput("generator parameters must be finite".into()));
    }
    let z = Complex64::new(0.0, 0.0);
    let gc = Complex64::new(g, 0.0);
    #[rustfmt::skip]
    let h = DMatrix::from_row_slice(3, 3, &[
        z,  z,  gc,
        z,  z,  gc,
        gc, gc, Complex64::new(-delta, -0.5 * kappa),
    ]);
    Ok(GeneratorMatrix::from_hamiltonian(
        h,
        SUBSPACE_LABELS.iter().map(|l| l.to_vec()).collect(),
    ))
}

/// Maps a subspace vector from the propagation frame back to the lab
/// rotating frame (multiplies the photon amplitude by e^{−iδt}).
pub fn restore_photon_phase(state: &[Complex64], delta: f64, t: f64) -> [Complex64; 3] {
    [state[0], state[1], state[2] * Complex64::new(0.0, -delta * t).exp()]
}
