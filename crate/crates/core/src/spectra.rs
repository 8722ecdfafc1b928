//! Small-tip-angle linear-response spectra in the eigenbasis of the
//! detection Hamiltonian.
//!
//! A weak y pulse on the observed spins turns ρ into ρ − iβ[F_y, ρ]. The
//! deviation δ = −i[F_y, ρ] evolves freely under H′ and is detected through
//! F⁺ on the observed spins. In the eigenbasis of H′ the signal is a sum of
//! sticks: the pair (a, b) contributes amplitude δ_ab·F⁺_ba at frequency
//! (E_b − E_a)/2π.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{build_hamiltonian, SpinSystem};
use crate::error::{Error, Result};
use crate::operator::{check_sites, collective_operator, ComplexMatrix, OperatorKind, C64, ZERO};
use crate::states::DensityMatrix;

/// Sticks whose frequencies differ by less than this (Hz) are one line.
const DEGENERACY_HZ: f64 = 1e-6;
/// Merged sticks below this fraction of the largest one are dropped.
const STICK_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stick {
    pub frequency_hz: f64,
    pub amplitude: C64,
}

/// Uniform frequency grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub min_hz: f64,
    pub max_hz: f64,
    pub points: usize,
}

impl FrequencyGrid {
    pub fn new(min_hz: f64, max_hz: f64, points: usize) -> Result<Self> {
        if points < 2 || !(max_hz > min_hz) || !min_hz.is_finite() || !max_hz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "frequency grid needs min < max and at least 2 points, got [{min_hz}, {max_hz}] x {points}"
            )));
        }
        Ok(Self { min_hz, max_hz, points })
    }

    /// Grid covering every stick with a margin of ten linewidths.
    pub fn covering(sticks: &[Stick], linewidth_hz: f64, points: usize) -> Result<Self> {
        let lo = sticks.iter().map(|s| s.frequency_hz).fold(0.0, f64::min);
        let hi = sticks.iter().map(|s| s.frequency_hz).fold(0.0, f64::max);
        let margin = 10.0 * linewidth_hz;
        Self::new(lo - margin, hi + margin, points)
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.min_hz + (self.max_hz - self.min_hz) * k as f64 / (self.points - 1) as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.frequency(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub sticks: Vec<Stick>,
    pub grid: FrequencyGrid,
    /// Real absorption curve sampled on `grid`.
    pub trace: Vec<f64>,
    /// Lorentzian full width at half maximum, Hz.
    pub linewidth_hz: f64,
}

impl Spectrum {
    /// Builds the trace for a set of sticks.
    pub fn from_sticks(sticks: Vec<Stick>, linewidth_hz: f64, grid: FrequencyGrid) -> Result<Self> {
        if !(linewidth_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("linewidth must be positive, got {linewidth_hz}")));
        }
        let trace = (0..grid.points)
            .into_par_iter()
            .map(|k| absorption(&sticks, linewidth_hz, grid.frequency(k)))
            .collect();
        Ok(Self { sticks, grid, trace, linewidth_hz })
    }

    /// Σ amplitudes, which equals Tr(F⁺ δ).
    pub fn total_amplitude(&self) -> C64 {
        self.sticks.iter().map(|s| s.amplitude).sum()
    }

    /// Two-column text table: frequency (Hz), absorption.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# frequency_hz,amplitude\n");
        for (k, y) in self.trace.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.grid.frequency(k), y));
        }
        out
    }
}

/// Re Σ A·L(ν − ν₀) with L the unit-height complex Lorentzian.
fn absorption(sticks: &[Stick], linewidth_hz: f64, nu: f64) -> f64 {
    let half = C64::new(linewidth_hz / 2.0, 0.0);
    sticks
        .iter()
        .map(|s| (s.amplitude * half / (half - C64::new(0.0, nu - s.frequency_hz))).re)
        .sum()
}

/// Sticks only, without a trace.
pub fn linear_response_sticks(
    rho: &DensityMatrix,
    sys: &SpinSystem,
    observe: &[usize],
    decouple: &[usize],
) -> Result<Vec<Stick>> {
    let n = sys.n_spins();
    if rho.n_spins() != n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: rho.dim() });
    }
    let observe = check_sites(observe, n)?;
    let decouple = if decouple.is_empty() { Vec::new() } else { check_sites(decouple, n)? };
    if let Some(&site) = observe.iter().find(|s| decouple.contains(s)) {
        return Err(Error::OverlappingSubsets(site));
    }

    let h = build_hamiltonian(&sys.decoupled(&decouple));
    let (energies, v) = h.hermitian_eigen()?;
    let fy = collective_operator(OperatorKind::Y, &observe, n)?;
    let fplus = collective_operator(OperatorKind::Plus, &observe, n)?;
    let delta = fy.commutator(rho.matrix()).scale(C64::new(0.0, -1.0));
    let vd = v.adjoint();
    let delta_e = &(&vd * &delta) * &v;
    let fplus_e = &(&vd * &fplus) * &v;

    let dim = rho.dim();
    let mut raw: Vec<Stick> = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            let amp = delta_e[(a, b)] * fplus_e[(b, a)];
            if amp != ZERO {
                let frequency_hz = (energies[b] - energies[a]) / std::f64::consts::TAU;
                raw.push(Stick { frequency_hz, amplitude: amp });
            }
        }
    }
    Ok(merge_degenerate(raw))
}

/// Sticks plus a Lorentzian trace on `grid`.
pub fn linear_response_spectrum(
    rho: &DensityMatrix,
    sys: &SpinSystem,
    observe: &[usize],
    decouple: &[usize],
    linewidth_hz: f64,
    grid: FrequencyGrid,
) -> Result<Spectrum> {
    let sticks = linear_response_sticks(rho, sys, observe, decouple)?;
    Spectrum::from_sticks(sticks, linewidth_hz, grid)
}

/// Sums sticks at numerically equal frequencies and drops negligible ones.
/// Summation within a degenerate group makes the result independent of the
/// eigenbasis chosen inside degenerate subspaces.
fn merge_degenerate(mut raw: Vec<Stick>) -> Vec<Stick> {
    raw.sort_by(|x, y| x.frequency_hz.total_cmp(&y.frequency_hz));
    let mut merged: Vec<(f64, C64, f64)> = Vec::new();
    let mut last_freq = f64::NEG_INFINITY;
    for s in raw {
        match merged.last_mut() {
            Some((f_sum, amp, w)) if s.frequency_hz - last_freq < DEGENERACY_HZ => {
                *f_sum += s.frequency_hz;
                *amp += s.amplitude;
                *w += 1.0;
            }
            _ => merged.push((s.frequency_hz, s.amplitude, 1.0)),
        }
        last_freq = s.frequency_hz;
    }
    let largest = merged.iter().map(|m| m.1.norm()).fold(0.0, f64::max);
    merged
        .into_iter()
        .filter(|m| largest > 0.0 && m.1.norm() > STICK_FLOOR * largest)
        .map(|(f_sum, amplitude, w)| Stick { frequency_hz: f_sum / w, amplitude })
        .collect()
}

/// A resolved line: summed complex amplitude at the |A|-weighted centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frequency_hz: f64,
    pub amplitude: C64,
}

/// Groups sticks that lie closer than half a linewidth to their neighbour,
/// sums each group and keeps groups above `threshold_fraction` of the largest.
pub fn peak_list(spec: &Spectrum, threshold_fraction: f64) -> Result<Vec<Peak>> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "peak threshold must lie in (0, 1), got {threshold_fraction}"
        )));
    }
    let mut sticks = spec.sticks.clone();
    sticks.sort_by(|x, y| x.frequency_hz.total_cmp(&y.frequency_hz));
    let gap = spec.linewidth_hz / 2.0;
    let mut clusters: Vec<Vec<Stick>> = Vec::new();
    for s in sticks {
        match clusters.last_mut() {
            Some(c) if s.frequency_hz - c.last().map_or(f64::NEG_INFINITY, |l| l.frequency_hz) < gap => c.push(s),
            _ => clusters.push(vec![s]),
        }
    }
    let peaks: Vec<Peak> = clusters
        .iter()
        .map(|c| {
            let amplitude: C64 = c.iter().map(|s| s.amplitude).sum();
            let weight: f64 = c.iter().map(|s| s.amplitude.norm()).sum();
            let frequency_hz = if weight > 0.0 {
                c.iter().map(|s| s.frequency_hz * s.amplitude.norm()).sum::<f64>() / weight
            } else {
                c[0].frequency_hz
            };
            Peak { frequency_hz, amplitude }
        })
        .collect();
    let largest = peaks.iter().map(|p| p.amplitude.norm()).fold(0.0, f64::max);
    Ok(peaks
        .into_iter()
        .filter(|p| largest > 0.0 && p.amplitude.norm() >= threshold_fraction * largest)
        .collect())
}

/// High-temperature equilibrium (I + ε Σ wᵢ 2Szᵢ)/2ⁿ, where `weights` are the
/// relative Zeeman polarizations of each spin.
pub fn thermal_state(weights: &[f64], epsilon: f64) -> Result<DensityMatrix> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::EmptySubset);
    }
    let spread: f64 = weights.iter().map(|w| w.abs()).sum::<f64>() * epsilon.abs();
    if !epsilon.is_finite() || spread > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "thermal polarization ε·Σ|w| must not exceed 1, got {spread}"
        )));
    }
    let dim = 1usize << n;
    let diag: Vec<C64> = (0..dim)
        .map(|x| {
            let z: f64 = (0..n)
                .map(|s| if crate::operator::is_down(x, s, n) { -weights[s] } else { weights[s] })
                .sum();
            C64::new((1.0 + epsilon * z) / dim as f64, 0.0)
        })
        .collect();
    DensityMatrix::new(ComplexMatrix::from_diagonal(&diag)?)
}
