use nalgebra::DMatrix;
use num_complex::Complex64;

use super::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::model::{occupation_index, occupation_of, product_dim};

pub const MAX_FOCK_DIM: usize = 4096;

/// Hamiltonians on a truncated Fock space (rad/s, ħ = 1).
///
/// Three-mode variants use mode order (a, b, c) and the frame in which the
/// cavity carries −δ − iκ/2 per photon; two-mode variants use (b, c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockModel {
    /// g_b(a†b + ab†) + g_c(a†c + ac†) − (δ + iκ/2) a†a
    LinearizedThreeMode { g_b: f64, g_c: f64, delta: f64, kappa: f64 },
    /// g_b(a†b + ab†) + g_c(a†c† + ac) − (δ + iκ/2) a†a
    SqueezerThreeMode { g_b: f64, g_c: f64, delta: f64, kappa: f64 },
    /// G₁ b†b + G₂ c†c + G₃(b†c + bc†)
    BeamSplitter { g1: f64, g2: f64, g3: f64 },
    /// G′₁(b†b + c†c) + G′₃(b†c† + bc)
    Squeezer { g1p: f64, g3p: f64 },
}

impl FockModel {
    pub fn modes(&self) -> usize {
        match self {
            FockModel::LinearizedThreeMode { .. } | FockModel::SqueezerThreeMode { .. } => 3,
            FockModel::BeamSplitter { .. } | FockModel::Squeezer { .. } => 2,
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            FockModel::LinearizedThreeMode { g_b, g_c, delta, kappa }
            | FockModel::SqueezerThreeMode { g_b, g_c, delta, kappa } => vec![g_b, g_c, delta, kappa],
            FockModel::BeamSplitter { g1, g2, g3 } => vec![g1, g2, g3],
            FockModel::Squeezer { g1p, g3p } => vec![g1p, g3p],
        }
    }
}

// One term of a Hamiltonian: coefficient times a product of ladder operators,
// given as (mode, +1 for creation / −1 for annihilation).
struct Term {
    coeff: Complex64,
    ops: Vec<(usize, i8)>,
}

fn term(coeff: f64, ops: &[(usize, i8)]) -> Term {
    Term {
        coeff: Complex64::new(coeff, 0.0),
        ops: ops.to_vec(),
    }
}

/// Applies the operator string right to left; returns the target occupation
/// and the √n matrix element, or None when the ladder leaves the cutoff.
fn apply(ops: &[(usize, i8)], occ: &[usize], cutoffs: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut occ = occ.to_vec();
    let mut amp = 1.0;
    for &(mode, dir) in ops.iter().rev() {
        let n = occ[mode];
        if dir > 0 {
            if n + 1 > cutoffs[mode] {
                return None;
            }
            amp *= ((n + 1) as f64).sqrt();
            occ[mode] = n + 1;
        } else {
            if n == 0 {
                return None;
            }
            amp *= (n as f64).sqrt();
            occ[mode] = n - 1;
        }
    }
    Some((occ, amp))
}

fn hermitian_pair(coeff: f64, raise: &[(usize, i8)]) -> [Term; 2] {
    let lower: Vec<(usize, i8)> = raise.iter().rev().map(|&(m, d)| (m, -d)).collect();
    [term(coeff, raise), term(coeff, &lower)]
}

fn terms_of(model: &FockModel) -> Vec<Term> {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    let mut out = Vec::new();
    match *model {
        FockModel::LinearizedThreeMode { g_b, g_c, delta, kappa } => {
            out.extend(hermitian_pair(g_b, &[(A, 1), (B, -1)]));
            out.extend(hermitian_pair(g_c, &[(A, 1), (C, -1)]));
            out.push(Term {
                coeff: Complex64::new(-delta, -0.5 * kappa),
                ops: vec![(A, 1), (A, -1)],
            });
        }
        FockModel::SqueezerThreeMode { g_b, g_c, delta, kappa } => {
            out.extend(hermitian_pair(g_b, &[(A, 1), (B, -1)]));
            out.extend(hermitian_pair(g_c, &[(A, 1), (C, 1)]));
            out.push(Term {
                coeff: Complex64::new(-delta, -0.5 * kappa),
                ops: vec![(A, 1), (A, -1)],
            });
        }
        FockModel::BeamSplitter { g1, g2, g3 } => {
            // two-mode labels: b is index 0, c is index 1
            out.push(term(g1, &[(0, 1), (0, -1)]));
            out.push(term(g2, &[(1, 1), (1, -1)]));
            out.extend(hermitian_pair(g3, &[(0, 1), (1, -1)]));
        }
        FockModel::Squeezer { g1p, g3p } => {
            out.push(term(g1p, &[(0, 1), (0, -1)]));
            out.push(term(g1p, &[(1, 1), (1, -1)]));
            out.extend(hermitian_pair(g3p, &[(0, 1), (1, 1)]));
        }
    }
    out
}

/// Dense generator −iH of `model` on the product space with the given
/// per-mode cutoffs (maximum occupation, inclusive).
pub fn build_fock_model(model: &FockModel, cutoffs: &[usize]) -> Result<GeneratorMatrix> {
    if cutoffs.len() != model.modes() {
        return Err(Error::InvalidInput(format!(
            "model has {} modes, got {} cutoffs",
            model.modes(),
            cutoffs.len()
        )));
    }
    if cutoffs.iter().any(|&c| c < 1) {
        return Err(Error::InvalidInput("every Fock cutoff must be at least 1".into()));
    }
    if model.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("model parameters must be finite".into()));
    }
    let dim = cutoffs
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c + 1))
        .unwrap_or(usize::MAX);
    if dim > MAX_FOCK_DIM {
        return Err(Error::DimensionTooLarge { dim, limit: MAX_FOCK_DIM });
    }
    debug_assert_eq!(dim, product_dim(cutoffs));

    let labels: Vec<Vec<usize>> = (0..dim).map(|i| occupation_of(cutoffs, i)).collect();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for t in terms_of(model) {
        if t.coeff == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (col, occ) in labels.iter().enumerate() {
            if let Some((target, amp)) = apply(&t.ops, occ, cutoffs) {
                let row = occupation_index(cutoffs, &target).expect("ladder result stays inside cutoffs");
                h[(row, col)] += t.coeff * amp;
            }
        }
    }
    Ok(GeneratorMatrix::from_hamiltonian(h, labels))
}
