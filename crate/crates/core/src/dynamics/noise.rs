use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{site_mask, ComplexMatrix};
use crate::states::DensityMatrix;

/// Per-spin decoherence and relaxation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    dephasing_rates: Vec<f64>,
    flip_rates: Vec<f64>,
    mc_phase_sigma: Option<Vec<f64>>,
    mc_trajectories: usize,
}

fn check_rates(name: &str, rates: &[f64]) -> Result<()> {
    match rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        Some(bad) => Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {bad}"))),
        None => Ok(()),
    }
}

impl NoiseModel {
    /// Dephasing rates γᵢ and flip rates κᵢ, both in 1/s.
    pub fn new(dephasing_rates: Vec<f64>, flip_rates: Vec<f64>) -> Result<Self> {
        if dephasing_rates.len() != flip_rates.len() {
            return Err(Error::DimensionMismatch { expected: dephasing_rates.len(), found: flip_rates.len() });
        }
        check_rates("dephasing rate", &dephasing_rates)?;
        check_rates("flip rate", &flip_rates)?;
        Ok(Self { dephasing_rates, flip_rates, mc_phase_sigma: None, mc_trajectories: 1 })
    }

    pub fn uniform(n: usize, dephasing: f64, flip: f64) -> Result<Self> {
        Self::new(vec![dephasing; n], vec![flip; n])
    }

    pub fn noiseless(n: usize) -> Self {
        Self { dephasing_rates: vec![0.0; n], flip_rates: vec![0.0; n], mc_phase_sigma: None, mc_trajectories: 1 }
    }

    /// Enables the Gaussian phase-kick alternative: per-spin standard deviations
    /// in radians and the number of trajectories to average.
    pub fn with_monte_carlo(mut self, sigma: Vec<f64>, trajectories: usize) -> Result<Self> {
        if sigma.len() != self.n_spins() {
            return Err(Error::DimensionMismatch { expected: self.n_spins(), found: sigma.len() });
        }
        check_rates("phase sigma", &sigma)?;
        if trajectories == 0 {
            return Err(Error::InvalidParameter("mc_trajectories must be >= 1".into()));
        }
        self.mc_phase_sigma = Some(sigma);
        self.mc_trajectories = trajectories;
        Ok(self)
    }

    pub fn n_spins(&self) -> usize {
        self.dephasing_rates.len()
    }

    pub fn dephasing_rates(&self) -> &[f64] {
        &self.dephasing_rates
    }

    pub fn flip_rates(&self) -> &[f64] {
        &self.flip_rates
    }

    pub fn mc_phase_sigma(&self) -> Option<&[f64]> {
        self.mc_phase_sigma.as_deref()
    }

    pub fn mc_trajectories(&self) -> usize {
        self.mc_trajectories
    }

    /// Phase spread √(γᵢ t) whose Gaussian kicks reproduce the dephasing
    /// channel over a delay `t`.
    pub fn diffusion_sigmas(&self, t: f64) -> Vec<f64> {
        self.dephasing_rates.iter().map(|g| (g * t).sqrt()).collect()
    }

    pub fn has_flips(&self) -> bool {
        self.flip_rates.iter().any(|&k| k > 0.0)
    }

    fn check_fits(&self, rho: &DensityMatrix, t: f64) -> Result<()> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        if self.n_spins() != rho.n_spins() {
            return Err(Error::DimensionMismatch { expected: rho.n_spins(), found: self.n_spins() });
        }
        Ok(())
    }
}

/// Exact solution of independent z-dephasing with jump operators √γᵢ Szᵢ.
///
/// Element (r, c) decays as exp(−t · ½ Σᵢ γᵢ [rᵢ ≠ cᵢ]).
pub fn apply_dephasing(rho: &DensityMatrix, noise: &NoiseModel, t: f64) -> Result<DensityMatrix> {
    noise.check_fits(rho, t)?;
    let n = rho.n_spins();
    let dim = rho.dim();
    // Decay rate of every spin-difference mask, built up one bit at a time.
    let mut rate = vec![0.0f64; dim];
    for mask in 1..dim {
        let low = mask & mask.wrapping_neg();
        let site = n - 1 - low.trailing_zeros() as usize;
        rate[mask] = rate[mask ^ low] + 0.5 * noise.dephasing_rates[site];
    }
    let factor: Vec<f64> = rate.iter().map(|r| (-r * t).exp()).collect();
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(dim, |r, c| m[(r, c)] * factor[r ^ c])?;
    Ok(rho.with_matrix(out))
}

/// Symmetric per-spin population exchange (jump operators √κᵢ S⁺ᵢ and √κᵢ S⁻ᵢ).
///
/// For each spin the channel is exact: ⟨Szᵢ⟩ relaxes as exp(−2κᵢt) toward zero
/// and single-spin coherences decay as exp(−κᵢt).
pub fn apply_flip_relaxation(rho: &DensityMatrix, noise: &NoiseModel, t: f64) -> Result<DensityMatrix> {
    noise.check_fits(rho, t)?;
    let n = rho.n_spins();
    let dim = rho.dim();
    let mut m = rho.matrix().clone();
    for (site, &kappa) in noise.flip_rates.iter().enumerate() {
        if kappa == 0.0 || t == 0.0 {
            continue;
        }
        let mask = site_mask(site, n);
        let e2 = (-2.0 * kappa * t).exp();
        let keep = 0.5 * (1.0 + e2);
        let swap = 0.5 * (1.0 - e2);
        let coh = (-kappa * t).exp();
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & mask != 0 {
                    m[(r, c)] *= coh;
                } else if r & mask == 0 {
                    let (rr, cc) = (r | mask, c | mask);
                    let up = m[(r, c)];
                    let down = m[(rr, cc)];
                    m[(r, c)] = up * keep + down * swap;
                    m[(rr, cc)] = down * keep + up * swap;
                }
            }
        }
    }
    Ok(rho.with_matrix(m))
}

/// Dephasing, then flip relaxation if `flips` is set. The two channels commute.
pub fn apply_relaxation(rho: &DensityMatrix, noise: &NoiseModel, t: f64, flips: bool) -> Result<DensityMatrix> {
    let out = apply_dephasing(rho, noise, t)?;
    if flips {
        apply_flip_relaxation(&out, noise, t)
    } else {
        Ok(out)
    }
}
