//! Single-exponential lifetime fits and the spin-count scaling of cat-state
//! phase noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{apply_dephasing, apply_phase_kicks_mc, NoiseModel};
use crate::error::{Error, Result};
use crate::states::{cat_state, nq_amplitude, CatWeights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Lifetime τ of A·exp(−t/τ), seconds.
    pub tau: f64,
    pub amplitude: f64,
    pub residual_rms: f64,
    pub r_squared: f64,
}

impl DecayFit {
    pub fn rate(&self) -> f64 {
        1.0 / self.tau
    }
}

/// Fits A·exp(−t/τ): ordinary least squares on ln y over the positive points,
/// then one Gauss–Newton step on the untransformed model using every point.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.iter().any(|&(t, y)| !t.is_finite() || !y.is_finite() || t < 0.0) {
        return Err(Error::Fit("times must be finite and non-negative, values finite".into()));
    }
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    let y0 = points[0].1;
    if points.iter().all(|&(_, y)| y == y0) {
        return Err(Error::Fit("all values are equal: no decay to fit".into()));
    }
    let positive: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, y)| y > 0.0).collect();
    if 2 * positive.len() < points.len() {
        return Err(Error::Fit(format!(
            "{} of {} values are non-positive: not a decaying positive signal",
            points.len() - positive.len(),
            points.len()
        )));
    }
    if positive.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 positive points, got {}", positive.len())));
    }
    let ts: Vec<f64> = positive.iter().map(|p| p.0).collect();
    let logs: Vec<f64> = positive.iter().map(|p| p.1.ln()).collect();
    let line = linear_regression(&ts, &logs)?;
    if !(line.slope < 0.0) {
        return Err(Error::Fit(format!("log-linear slope {} is not negative: no decay", line.slope)));
    }
    let (mut amp, mut k) = (line.intercept.exp(), -line.slope);

    // Normal equations of the linearized residual y − A e^{−kt} in (δA, δk).
    let (mut jaa, mut jak, mut jkk, mut ga, mut gk) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, y) in points {
        let e = (-k * t).exp();
        let r = y - amp * e;
        let (da, dk) = (e, -amp * t * e);
        jaa += da * da;
        jak += da * dk;
        jkk += dk * dk;
        ga += da * r;
        gk += dk * r;
    }
    let det = jaa * jkk - jak * jak;
    if det.abs() > f64::EPSILON * jaa * jkk {
        let step_a = (jkk * ga - jak * gk) / det;
        let step_k = (jaa * gk - jak * ga) / det;
        if k + step_k > 0.0 && amp + step_a > 0.0 {
            amp += step_a;
            k += step_k;
        }
    }

    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for &(t, y) in points {
        ss_res += (y - amp * (-k * t).exp()).powi(2);
        ss_tot += (y - mean).powi(2);
    }
    Ok(DecayFit { tau: 1.0 / k, amplitude: amp, residual_rms: (ss_res / n).sqrt(), r_squared: 1.0 - ss_res / ss_tot })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation coefficient.
    pub r: f64,
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let r = if syy == 0.0 { 1.0 } else { sxy / (sxx * syy).sqrt() };
    Ok(LinearFit { slope, intercept: my - slope * mx, r })
}

/// Standard error of an OLS slope when each y carries an independent error.
pub fn slope_standard_error(xs: &[f64], y_errors: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    xs.iter().zip(y_errors).map(|(x, e)| ((x - mx) / sxx * e).powi(2)).sum::<f64>().sqrt()
}

/// Standard error of the mean of cos X over `trajectories` draws of
/// X ~ N(0, s²): Var cos X = ½(1 + e^{−2s²}) − e^{−s²}.
pub fn phase_average_standard_error(variance: f64, trajectories: usize) -> f64 {
    let var = 0.5 * (1.0 + (-2.0 * variance).exp()) - (-variance).exp();
    (var.max(0.0) / trajectories as f64).sqrt()
}

/// How the cat coherence is dephased in a scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ScalingMode {
    /// Exact channel with per-spin rate `gamma`.
    Analytic { gamma: f64 },
    /// Ensemble of Gaussian phase kicks with per-spin variance γ·t.
    MonteCarlo { gamma: f64, trajectories: usize, seed: u64 },
}

impl ScalingMode {
    pub fn gamma(&self) -> f64 {
        match *self {
            ScalingMode::Analytic { gamma } | ScalingMode::MonteCarlo { gamma, .. } => gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    /// Fitted decay rate of the N-quantum amplitude, 1/s.
    pub rate: f64,
    pub fit: DecayFit,
    /// Monte Carlo only: sampling error of `rate` propagated from the
    /// longest delay.
    pub rate_std_error: Option<f64>,
}

/// Normalized N-quantum amplitude of the balanced N-spin cat after each delay.
pub fn cat_decay_curve(n: usize, mode: ScalingMode, delays: &[f64]) -> Result<Vec<(f64, f64)>> {
    if mode.gamma() < 0.0 || !mode.gamma().is_finite() {
        return Err(Error::InvalidParameter(format!("dephasing rate must be non-negative, got {}", mode.gamma())));
    }
    let rho = cat_state(n, CatWeights::balanced())?;
    let sites: Vec<usize> = (0..n).collect();
    let amp0 = nq_amplitude(&rho, &sites)?;
    delays
        .iter()
        .map(|&t| {
            if t < 0.0 {
                return Err(Error::NegativeTime(t));
            }
            let out = match mode {
                ScalingMode::Analytic { gamma } => apply_dephasing(&rho, &NoiseModel::uniform(n, gamma, 0.0)?, t)?,
                ScalingMode::MonteCarlo { gamma, trajectories, seed } => {
                    let noise = NoiseModel::noiseless(n).with_monte_carlo(vec![(gamma * t).sqrt(); n], trajectories)?;
                    apply_phase_kicks_mc(&rho, &noise, seed)?
                }
            };
            Ok((t, (nq_amplitude(&out, &sites)? / amp0).re))
        })
        .collect()
}

/// Decay rate of the N-spin cat coherence for each N in `n_range`.
pub fn scaling_study(n_range: &[usize], mode: ScalingMode, delays: &[f64]) -> Result<Vec<ScalingPoint>> {
    n_range
        .par_iter()
        .map(|&n| {
            let curve = cat_decay_curve(n, mode, delays)?;
            let fit = fit_exponential(&curve)?;
            let rate_std_error = match mode {
                ScalingMode::Analytic { .. } => None,
                ScalingMode::MonteCarlo { gamma, trajectories, .. } => {
                    let t = delays.iter().copied().fold(0.0, f64::max);
                    let factor = (-(n as f64) * gamma * t / 2.0).exp();
                    Some(phase_average_standard_error(n as f64 * gamma * t, trajectories) / (factor * t))
                }
            };
            Ok(ScalingPoint { n, rate: fit.rate(), fit, rate_std_error })
        })
        .collect()
}
