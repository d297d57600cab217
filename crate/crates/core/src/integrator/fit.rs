use super::{FockModel, PropagationResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingFit {
    /// rad/s
    pub rate: f64,
    /// RMS misfit over the fitted samples
    pub residual: f64,
    pub warning: Option<String>,
}

const MAX_RESIDUAL: f64 = 0.05;

fn series(result: &PropagationResult, label: &[usize]) -> Result<Vec<f64>> {
    (0..result.times.len())
        .map(|i| {
            result
                .amplitude(i, label)
                .map(|z| z.norm_sqr())
                .ok_or_else(|| Error::InvalidInput(format!("basis has no state {label:?}")))
        })
        .collect()
}

fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Fits |c010(t)|² ≈ sin²(G_fit t) over the first transfer lobe.
///
/// Accepts a linearized three-mode run started in |0,01⟩ or a beam-splitter
/// run started in |01⟩.
pub fn extract_effective_coupling(result: &PropagationResult, model: &FockModel) -> Result<CouplingFit> {
    let (label, scale, warning): (&[usize], f64, Option<String>) = match *model {
        FockModel::LinearizedThreeMode { g_b, g_c, delta, .. } => {
            let g = g_b.abs().max(g_c.abs());
            let warning = (g > 0.0 && delta.abs() / g < 10.0).then(|| {
                format!(
                    "δ/G = {:.3} is below 10; the cavity is not adiabatically eliminated",
                    delta.abs() / g
                )
            });
            (&[0, 1, 0], g, warning)
        }
        FockModel::BeamSplitter { g3, .. } => (&[1, 0], g3.abs(), None),
        _ => {
            return Err(Error::InvalidInput(
                "coupling fit needs a linearized three-mode or beam-splitter run".into(),
            ))
        }
    };
    if scale == 0.0 {
        return Err(Error::FitDiverged("zero coupling, nothing oscillates".into()));
    }
    let y = series(result, label)?;
    let t = &result.times;

    let first_high = y
        .iter()
        .position(|&v| v > 0.5)
        .ok_or_else(|| Error::FitDiverged("population never passes 1/2 on the grid".into()))?;
    // the lobe is the run of samples above 1/2; fast ripples from the cavity
    // make its first local maximum unreliable, so take the largest sample
    let lobe_end = (first_high..y.len()).find(|&i| y[i] <= 0.5).unwrap_or(y.len());
    let peak = (first_high..lobe_end)
        .max_by(|&i, &j| y[i].total_cmp(&y[j]))
        .expect("lobe has at least one sample");
    if lobe_end == y.len() {
        return Err(Error::FitDiverged("grid ends before the first transfer peak".into()));
    }
    let t_peak = t[peak] - t[0];
    if t_peak <= 0.0 {
        return Err(Error::FitDiverged("transfer peak at the start of the grid".into()));
    }
    // samples up to twice the peak time cover the whole first lobe
    let end = t.iter().position(|&ti| ti - t[0] > 2.0 * t_peak).unwrap_or(t.len());
    let rms = |g: f64| {
        let s: f64 = (0..end).map(|i| (y[i] - (g * (t[i] - t[0])).sin().powi(2)).powi(2)).sum();
        (s / end as f64).sqrt()
    };
    let g0 = std::f64::consts::FRAC_PI_2 / t_peak;
    let rate = golden_min(0.7 * g0, 1.3 * g0, rms);
    let residual = rms(rate);
    if residual > MAX_RESIDUAL {
        return Err(Error::FitDiverged(format!("residual {residual:.3} above {MAX_RESIDUAL}")));
    }
    Ok(CouplingFit { rate, residual, warning })
}

/// Slope of |c(1,1)| for a squeezer run from vacuum; the pair amplitude grows
/// as G′₃t at small t.
pub fn fit_pair_creation_rate(result: &PropagationResult, model: &FockModel) -> Result<CouplingFit> {
    let label: &[usize] = match model {
        FockModel::SqueezerThreeMode { .. } => &[0, 1, 1],
        FockModel::Squeezer { .. } => &[1, 1],
        _ => return Err(Error::InvalidInput("pair-creation fit needs a squeezer run".into())),
    };
    let amp: Vec<f64> = series(result, label)?.into_iter().map(f64::sqrt).collect();
    let t: Vec<f64> = result.times.iter().map(|ti| ti - result.times[0]).collect();
    let stt: f64 = t.iter().map(|x| x * x).sum();
    if stt == 0.0 {
        return Err(Error::FitDiverged("grid has no extent".into()));
    }
    let rate = t.iter().zip(&amp).map(|(x, y)| x * y).sum::<f64>() / stt;
    let top = amp.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::FitDiverged("no pair amplitude appears".into()));
    }
    let residual = (t.iter().zip(&amp).map(|(x, y)| (y - rate * x).powi(2)).sum::<f64>() / t.len() as f64)
        .sqrt()
        / top;
    Ok(CouplingFit { rate, residual, warning: None })
}
