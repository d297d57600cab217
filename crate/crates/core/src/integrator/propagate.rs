use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::GeneratorMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// exponential for dim ≤ 64, Runge–Kutta above
    Auto,
    /// exact exponential per grid interval (scaling and squaring)
    Exponential,
    /// embedded Dormand–Prince 5(4) with adaptive steps
    RungeKutta,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_local_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub step_stats: StepStats,
    pub basis_labels: Vec<Vec<usize>>,
}

impl PropagationResult {
    pub fn amplitude(&self, sample: usize, label: &[usize]) -> Option<Complex64> {
        let idx = self.basis_labels.iter().position(|l| l == label)?;
        Some(self.states[sample][idx])
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }
}

const EXPONENTIAL_DIM_LIMIT: usize = 64;

/// Solves dψ/dt = M ψ on `t_grid`, starting from `initial` at `t_grid[0]`.
pub fn propagate(
    gen: &GeneratorMatrix,
    initial: &[Complex64],
    t_grid: &[f64],
    tol: f64,
) -> Result<PropagationResult> {
    propagate_with(gen, initial, t_grid, tol, Method::Auto)
}

pub fn propagate_with(
    gen: &GeneratorMatrix,
    initial: &[Complex64],
    t_grid: &[f64],
    tol: f64,
    method: Method,
) -> Result<PropagationResult> {
    if initial.len() != gen.dim {
        return Err(Error::InvalidInput(format!(
            "initial state has length {}, generator has dimension {}",
            initial.len(),
            gen.dim
        )));
    }
    let norm = initial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(Error::InvalidInput(format!("tolerance {tol:e} outside [1e-13, 1e-6]")));
    }
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] >= w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("time grid must be finite and nondecreasing".into()));
    }

    let method = match method {
        Method::Auto if gen.dim <= EXPONENTIAL_DIM_LIMIT => Method::Exponential,
        Method::Auto => Method::RungeKutta,
        m => m,
    };
    let (states, step_stats) = match method {
        Method::Exponential => by_exponential(&gen.entries, initial, t_grid),
        _ => by_runge_kutta(&gen.entries, initial, t_grid, tol)?,
    };
    Ok(PropagationResult {
        times: t_grid.to_vec(),
        states,
        step_stats,
        basis_labels: gen.basis_labels.clone(),
    })
}

fn by_exponential(m: &DMatrix<Complex64>, initial: &[Complex64], grid: &[f64]) -> (Vec<Vec<Complex64>>, StepStats) {
    let mut states = Vec::with_capacity(grid.len());
    states.push(initial.to_vec());
    let mut psi = DVector::from_column_slice(initial);
    let mut cached: Option<(f64, DMatrix<Complex64>)> = None;
    let mut stats = StepStats::default();
    let slack = 8.0 * f64::EPSILON * grid.iter().fold(0.0, |a: f64, t| a.max(t.abs()));
    for w in grid.windows(2) {
        let dt = w[1] - w[0];
        // spacings of a uniform grid differ by a few ulps of t itself; reusing
        // the propagator across them is no worse than the rounding of the grid
        let reuse = matches!(&cached, Some((h, _)) if (*h - dt).abs() <= slack);
        if !reuse {
            let u = (m * Complex64::new(dt, 0.0)).exp();
            cached = Some((dt, u));
        }
        let u = &cached.as_ref().expect("propagator cached above").1;
        psi = u * psi;
        stats.accepted += 1;
        states.push(psi.as_slice().to_vec());
    }
    (states, stats)
}

// Dormand–Prince 5(4) tableau; the nodes are not needed for an autonomous system.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn by_runge_kutta(
    m: &DMatrix<Complex64>,
    initial: &[Complex64],
    grid: &[f64],
    tol: f64,
) -> Result<(Vec<Vec<Complex64>>, StepStats)> {
    let n = initial.len();
    let mut states = Vec::with_capacity(grid.len());
    states.push(initial.to_vec());
    let mut stats = StepStats::default();

    let mut y = DVector::from_column_slice(initial);
    let mut t = grid[0];
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let mut h = if scale > 0.0 { 0.1 / scale } else { f64::INFINITY };
    let mut k: Vec<DVector<Complex64>> = vec![DVector::zeros(n); 7];
    k[0] = m * &y;

    for &t_end in &grid[1..] {
        while t < t_end {
            let span = t_end - t;
            let step = h.min(span);
            if step <= 1e-14 * t.abs().max(span) {
                return Err(Error::StepFailure { t, h: step });
            }
            for s in 1..7 {
                let mut arg = y.clone();
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        arg.axpy(Complex64::new(step * A[s][j], 0.0), kj, Complex64::new(1.0, 0.0));
                    }
                }
                k[s] = m * &arg;
            }
            let mut y5 = y.clone();
            let mut err = DVector::<Complex64>::zeros(n);
            for s in 0..7 {
                if B5[s] != 0.0 {
                    y5.axpy(Complex64::new(step * B5[s], 0.0), &k[s], Complex64::new(1.0, 0.0));
                }
                let e = B5[s] - B4[s];
                if e != 0.0 {
                    err.axpy(Complex64::new(step * e, 0.0), &k[s], Complex64::new(1.0, 0.0));
                }
            }
            let mut ratio: f64 = 0.0;
            let mut abs_err: f64 = 0.0;
            for i in 0..n {
                let sc = tol + tol * y[i].norm().max(y5[i].norm());
                ratio = ratio.max(err[i].norm() / sc);
                abs_err = abs_err.max(err[i].norm());
            }
            if ratio <= 1.0 {
                t = if step == span { t_end } else { t + step };
                y = y5;
                // FSAL: the last stage was evaluated at the accepted point
                k[0] = k[6].clone();
                stats.accepted += 1;
                stats.max_local_error = stats.max_local_error.max(abs_err);
            } else {
                stats.rejected += 1;
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            let clipped = step < h;
            h = if clipped && ratio <= 1.0 {
                // a step shortened to hit the grid says nothing about h itself
                h.max(step * factor)
            } else {
                step * factor
            };
        }
        states.push(y.as_slice().to_vec());
    }
    Ok((states, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::build_subspace_generator;
    use crate::analytic::Scheme;
    use crate::units::khz;

    fn grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
    }

    fn e0(dim: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn zero_generator_keeps_state() {
        let gen = GeneratorMatrix {
            dim: 3,
            entries: DMatrix::zeros(3, 3),
            basis_labels: vec![vec![0], vec![1], vec![2]],
        };
        let init = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
        ];
        for method in [Method::Exponential, Method::RungeKutta] {
            let r = propagate_with(&gen, &init, &grid(1.0, 10), 1e-10, method).unwrap();
            assert!(r.states.iter().all(|s| s == &init));
        }
    }

    #[test]
    fn first_state_is_initial_bit_for_bit() {
        let gen = build_subspace_generator(Scheme::Detuned, khz(50.0), khz(200.0), khz(75.2)).unwrap();
        let init = e0(3);
        let r = propagate(&gen, &init, &[1e-6, 2e-6], 1e-10).unwrap();
        assert_eq!(r.states[0], init);
        assert_eq!(r.times, vec![1e-6, 2e-6]);
    }

    #[test]
    fn lossless_norm_drift() {
        let gen = build_subspace_generator(Scheme::Detuned, khz(50.0), khz(200.0), 0.0).unwrap();
        for method in [Method::Exponential, Method::RungeKutta] {
            let r = propagate_with(&gen, &e0(3), &grid(1e-4, 1000), 1e-12, method).unwrap();
            for n in r.norms() {
                assert!((n - 1.0).abs() < 1e-10, "{method:?}: {n}");
            }
        }
    }

    #[test]
    fn lossy_norm_is_nonincreasing() {
        let gen = build_subspace_generator(Scheme::Resonant, khz(50.0), 0.0, khz(75.2)).unwrap();
        let r = propagate(&gen, &e0(3), &grid(1e-4, 500), 1e-12).unwrap();
        let n = r.norms();
        assert!(n.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(*n.last().unwrap() < 0.9);
    }

    #[test]
    fn methods_agree() {
        let gen = build_subspace_generator(Scheme::Detuned, khz(40.0), khz(150.0), khz(60.0)).unwrap();
        let g = grid(5e-5, 100);
        let a = propagate_with(&gen, &e0(3), &g, 1e-12, Method::Exponential).unwrap();
        let b = propagate_with(&gen, &e0(3), &g, 1e-12, Method::RungeKutta).unwrap();
        let dev = a
            .states
            .iter()
            .zip(&b.states)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max);
        assert!(dev < 1e-9, "max deviation {dev:e}");
        assert!(b.step_stats.accepted > 0);
    }

    #[test]
    fn preconditions() {
        let gen = build_subspace_generator(Scheme::Resonant, 1.0, 0.0, 0.0).unwrap();
        let bad = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(propagate(&gen, &bad, &[0.0, 1.0], 1e-10), Err(Error::NotNormalized(_))));
        assert!(propagate(&gen, &e0(3), &[0.0, 1.0], 1e-3).is_err());
        assert!(propagate(&gen, &e0(3), &[1.0, 0.0], 1e-10).is_err());
        assert!(propagate(&gen, &e0(2), &[0.0, 1.0], 1e-10).is_err());
    }
}
