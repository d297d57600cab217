use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::FockState;

/// Split of mode indices into two parties; modes in neither are traced out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Bipartition {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Self {
        Self { left, right }
    }

    fn check(&self, modes: usize) -> Result<()> {
        if self.left.is_empty() || self.right.is_empty() {
            return Err(Error::InvalidInput("both sides of a bipartition need a mode".into()));
        }
        let mut seen = vec![false; modes];
        for &m in self.left.iter().chain(&self.right) {
            if m >= modes {
                return Err(Error::InvalidInput(format!("mode {m} out of range for {modes} modes")));
            }
            if seen[m] {
                return Err(Error::InvalidInput(format!("mode {m} appears twice in the bipartition")));
            }
            seen[m] = true;
        }
        Ok(())
    }
}

// Strides of the row-major product basis.
fn strides(cutoffs: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cutoffs.len()];
    for i in (0..cutoffs.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * (cutoffs[i + 1] + 1);
    }
    s
}

// Enumerates the flat offsets contributed by a subset of modes, row-major in
// the order given.
fn offsets(modes: &[usize], cutoffs: &[usize], stride: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &m in modes {
        let mut next = Vec::with_capacity(out.len() * (cutoffs[m] + 1));
        for &base in &out {
            for n in 0..=cutoffs[m] {
                next.push(base + n * stride[m]);
            }
        }
        out = next;
    }
    out
}

/// E_N = log₂ ‖ρ^{T_R}‖₁ of the (reduced) state on left ∪ right.
pub fn logarithmic_negativity(state: &FockState, partition: &Bipartition) -> Result<f64> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let cutoffs = &state.cutoffs;
    partition.check(cutoffs.len())?;
    let rest: Vec<usize> = (0..cutoffs.len())
        .filter(|m| !partition.left.contains(m) && !partition.right.contains(m))
        .collect();

    let stride = strides(cutoffs);
    let lo = offsets(&partition.left, cutoffs, &stride);
    let ro = offsets(&partition.right, cutoffs, &stride);
    let to = offsets(&rest, cutoffs, &stride);
    let (dl, dr) = (lo.len(), ro.len());
    let psi = &state.amplitudes;

    // ψ as a (left·right) × rest matrix, so ρ = Ψ Ψ†
    let mut m = DMatrix::<Complex64>::zeros(dl * dr, to.len());
    for (i, &l) in lo.iter().enumerate() {
        for (j, &r) in ro.iter().enumerate() {
            for (k, &t) in to.iter().enumerate() {
                m[(i * dr + j, k)] = psi[l + r + t];
            }
        }
    }
    let rho = &m * m.adjoint();

    let dim = dl * dr;
    let mut pt = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dl {
        for j in 0..dr {
            for ip in 0..dl {
                for jp in 0..dr {
                    pt[(i * dr + j, ip * dr + jp)] = rho[(i * dr + jp, ip * dr + j)];
                }
            }
        }
    }
    let trace_norm: f64 = blocks(&pt)
        .into_iter()
        .map(|idx| {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| pt[(idx[r], idx[c])]);
            sub.symmetric_eigenvalues().iter().map(|v| v.abs()).sum::<f64>()
        })
        .sum();
    Ok(trace_norm.log2().max(0.0))
}

/// Index sets of the connected components of the nonzero pattern of a
/// Hermitian matrix; its spectrum is the union of the blocks' spectra.
/// Rows that are entirely zero contribute only zero eigenvalues and are dropped.
fn blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut live = vec![false; n];
    for j in 0..n {
        for i in 0..=j {
            if m[(i, j)] != Complex64::new(0.0, 0.0) {
                live[i] = true;
                live[j] = true;
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in (0..n).filter(|&i| live[i]) {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}
