//! Ensemble average over random collective z-rotations.
//!
//! Trajectory `k` draws its phases from a ChaCha stream selected by `k`, so
//! each trajectory's randomness depends only on (seed, k). Trajectories are
//! summed in fixed-size blocks and the blocks are reduced in index order,
//! which keeps the result bitwise identical however rayon schedules them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::gates::diagonal_phases;
use super::noise::NoiseModel;
use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, C64, ZERO};
use crate::states::DensityMatrix;

const BLOCK: usize = 64;

/// Phases φᵢ ~ N(0, σᵢ²) for trajectory `k`.
pub fn trajectory_phases(seed: u64, k: u64, sigma: &[f64]) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    sigma
        .iter()
        .map(|&s| {
            let z: f64 = StandardNormal.sample(&mut rng);
            s * z
        })
        .collect()
}

/// Average of Π Rz(φᵢ) ρ Π Rz(φᵢ)† over `mc_trajectories` Gaussian draws.
pub fn apply_phase_kicks_mc(rho: &DensityMatrix, noise: &NoiseModel, rng_seed: u64) -> Result<DensityMatrix> {
    let sigma = noise.mc_phase_sigma().ok_or(Error::MonteCarloUnset)?;
    let n = rho.n_spins();
    if sigma.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sigma.len() });
    }
    let trajectories = noise.mc_trajectories();
    if trajectories == 0 {
        return Err(Error::MonteCarloUnset);
    }
    if sigma.iter().all(|&s| s == 0.0) {
        return Ok(rho.clone());
    }
    let dim = rho.dim();
    let m = rho.matrix();
    // Only the non-zero elements need a phase factor.
    let support: Vec<(usize, usize)> = (0..dim)
        .flat_map(|r| (0..dim).map(move |c| (r, c)))
        .filter(|&(r, c)| m[(r, c)] != ZERO)
        .collect();

    let n_blocks = trajectories.div_ceil(BLOCK);
    let partials: Vec<Vec<C64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![ZERO; support.len()];
            for k in b * BLOCK..((b + 1) * BLOCK).min(trajectories) {
                let phases = diagonal_phases(&trajectory_phases(rng_seed, k as u64, sigma), n);
                for (slot, &(r, c)) in acc.iter_mut().zip(&support) {
                    *slot += phases[r] * phases[c].conj();
                }
            }
            acc
        })
        .collect();

    let mut total = vec![ZERO; support.len()];
    for block in &partials {
        for (t, v) in total.iter_mut().zip(block) {
            *t += v;
        }
    }
    let inv = 1.0 / trajectories as f64;
    let mut out = ComplexMatrix::zeros(dim)?;
    for (&(r, c), f) in support.iter().zip(&total) {
        out[(r, c)] = m[(r, c)] * f * inv;
    }
    Ok(rho.with_matrix(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{cat_state, nq_amplitude, CatWeights};

    #[test]
    fn zero_sigma_is_identity() {
        let rho = cat_state(3, CatWeights::balanced()).unwrap();
        let noise = NoiseModel::noiseless(3).with_monte_carlo(vec![0.0; 3], 10).unwrap();
        assert_eq!(apply_phase_kicks_mc(&rho, &noise, 1).unwrap(), rho);
    }

    #[test]
    fn unset_parameters_rejected() {
        let rho = cat_state(2, CatWeights::balanced()).unwrap();
        assert!(matches!(
            apply_phase_kicks_mc(&rho, &NoiseModel::noiseless(2), 0),
            Err(Error::MonteCarloUnset)
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let rho = cat_state(4, CatWeights::balanced()).unwrap();
        let noise = NoiseModel::noiseless(4).with_monte_carlo(vec![0.4; 4], 500).unwrap();
        let a = apply_phase_kicks_mc(&rho, &noise, 42).unwrap();
        let b = apply_phase_kicks_mc(&rho, &noise, 42).unwrap();
        assert_eq!(a, b);
        let c = apply_phase_kicks_mc(&rho, &noise, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn one_spin_converges_to_gaussian_factor() {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = DensityMatrix::pure(&[h, h]).unwrap();
        let sigma = 0.7;
        let m = 20_000;
        let noise = NoiseModel::noiseless(1).with_monte_carlo(vec![sigma], m).unwrap();
        let out = apply_phase_kicks_mc(&rho, &noise, 9).unwrap();
        let factor = out.matrix()[(0, 1)] / rho.matrix()[(0, 1)];
        let expected = (-sigma * sigma / 2.0f64).exp();
        // Var cos φ = ½(1 + e^{−2σ²}) − e^{−σ²}
        let var = 0.5 * (1.0 + (-2.0 * sigma * sigma).exp()) - (-sigma * sigma).exp();
        let se = (var / m as f64).sqrt();
        assert!((factor.re - expected).abs() < 4.0 * se, "{} vs {}", factor.re, expected);
    }

    #[test]
    fn nq_amplitude_shrinks_by_n_sigma_squared() {
        let n = 5;
        let sigma = 0.25;
        let m = 20_000;
        let rho = cat_state(n, CatWeights::balanced()).unwrap();
        let noise = NoiseModel::noiseless(n).with_monte_carlo(vec![sigma; n], m).unwrap();
        let out = apply_phase_kicks_mc(&rho, &noise, 5).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let ratio = nq_amplitude(&out, &all).unwrap().re / 0.5;
        let s2 = n as f64 * sigma * sigma;
        let expected = (-s2 / 2.0).exp();
        let var = 0.5 * (1.0 + (-2.0 * s2).exp()) - (-s2).exp();
        assert!((ratio - expected).abs() < 4.0 * (var / m as f64).sqrt());
    }
}
