use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{check_sites, is_down, kron, propagator, site_mask, ComplexMatrix, SpinIndex, C64, ONE, ZERO};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Ideal instantaneous rotation of a set of spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub targets: Vec<usize>,
    pub axis: Axis,
    /// Rotation angle in radians.
    pub angle: f64,
    /// Rotation of the pulse axis about z, radians.
    pub phase: f64,
}

impl Pulse {
    pub fn new(targets: Vec<usize>, axis: Axis, angle: f64) -> Self {
        Self { targets, axis, angle, phase: 0.0 }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Unitary of this pulse on an n-spin register.
    pub fn unitary(&self, n: usize) -> Result<ComplexMatrix> {
        if !self.angle.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidParameter(format!("pulse angle {} / phase {}", self.angle, self.phase)));
        }
        let targets = check_sites(&self.targets, n)?;
        let (nx, ny, nz) = match self.axis {
            Axis::X => (self.phase.cos(), self.phase.sin(), 0.0),
            Axis::Y => (-self.phase.sin(), self.phase.cos(), 0.0),
            Axis::Z => (0.0, 0.0, 1.0),
        };
        // exp(−iθ n·σ/2) = cos(θ/2) − i sin(θ/2) n·σ
        let (s, c) = (self.angle / 2.0).sin_cos();
        let ms = C64::new(0.0, -s);
        let rot = ComplexMatrix::from_row_major(
            2,
            &[
                C64::new(c, 0.0) + ms * nz,
                ms * C64::new(nx, -ny),
                ms * C64::new(nx, ny),
                C64::new(c, 0.0) - ms * nz,
            ],
        )?;
        let id = ComplexMatrix::identity(2)?;
        let mut u = ComplexMatrix::identity(1)?;
        for site in 0..n {
            let factor = if targets.contains(&site) { &rot } else { &id };
            u = kron(&u, factor);
        }
        Ok(u)
    }
}

/// ρ → UρU† for an ideal pulse.
pub fn apply_pulse(rho: &DensityMatrix, p: &Pulse) -> Result<DensityMatrix> {
    let u = p.unitary(rho.n_spins())?;
    Ok(rho.with_matrix(rho.matrix().conjugate_by(&u)))
}

/// ρ → UρU† with U = exp(−iHt).
pub fn evolve(rho: &DensityMatrix, h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: h.dim() });
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let u = propagator(h, t)?;
    Ok(rho.with_matrix(rho.matrix().conjugate_by(&u)))
}

/// Conjugation by Π Rz(φᵢ) = Π exp(−iφᵢ Szᵢ); `angles[i]` rotates spin i.
pub fn rotate_z(rho: &DensityMatrix, angles: &[f64]) -> Result<DensityMatrix> {
    let n = rho.n_spins();
    if angles.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: angles.len() });
    }
    let phase = diagonal_phases(angles, n);
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(rho.dim(), |r, c| m[(r, c)] * phase[r] * phase[c].conj())?;
    Ok(rho.with_matrix(out))
}

/// e^{−iΣφᵢ sᵢ(x)} for every basis state x.
pub(crate) fn diagonal_phases(angles: &[f64], n: usize) -> Vec<C64> {
    (0..1usize << n)
        .map(|x| {
            let theta: f64 = angles
                .iter()
                .enumerate()
                .map(|(s, &a)| if is_down(x, s, n) { -0.5 * a } else { 0.5 * a })
                .sum();
            C64::from_polar(1.0, -theta)
        })
        .collect()
}

/// ρ'[r, c] = ρ[π(r), π(c)] for an involutive basis permutation π.
pub(crate) fn permute_involution(rho: &DensityMatrix, perm: impl Fn(usize) -> usize) -> DensityMatrix {
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(rho.dim(), |r, c| m[(perm(r), perm(c))]).expect("same dimension");
    rho.with_matrix(out)
}

fn check_cnot(control: usize, targets: &[usize], n: usize) -> Result<usize> {
    if control >= n {
        return Err(Error::SiteOutOfRange { site: control, n });
    }
    let targets = check_sites(targets, n)?;
    if targets.contains(&control) {
        return Err(Error::OverlappingSubsets(control));
    }
    Ok(targets.iter().fold(0, |acc, &s| acc | site_mask(s, n)))
}

/// Flips every target spin iff the control spin is |↓⟩.
pub fn controlled_not_all(rho: &DensityMatrix, control: SpinIndex, targets: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_spins();
    let tmask = check_cnot(control.site, targets, n)?;
    let cmask = site_mask(control.site, n);
    Ok(permute_involution(rho, |x| if x & cmask != 0 { x ^ tmask } else { x }))
}

/// Dense matrix of the multi-target controlled-NOT.
pub fn controlled_not_unitary(n: usize, control: usize, targets: &[usize]) -> Result<ComplexMatrix> {
    let tmask = check_cnot(control, targets, n)?;
    let cmask = site_mask(control, n);
    ComplexMatrix::from_fn(1 << n, |r, c| {
        let image = if c & cmask != 0 { c ^ tmask } else { c };
        if r == image {
            ONE
        } else {
            ZERO
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{collective_operator, OperatorKind};
    use crate::states::{cat_state, ferro_state, CatWeights, Ferro};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn zero_angle_pulse_is_identity() {
        let rho = cat_state(3, CatWeights::balanced()).unwrap();
        let out = apply_pulse(&rho, &Pulse::new(vec![0, 1, 2], Axis::X, 0.0)).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn hard_pi_pulse_inverts_ferro() {
        for n in 1..6 {
            let all: Vec<usize> = (0..n).collect();
            let up = ferro_state(n, Ferro::Alive).unwrap();
            let down = ferro_state(n, Ferro::Dead).unwrap();
            for axis in [Axis::X, Axis::Y] {
                let out = apply_pulse(&up, &Pulse::new(all.clone(), axis, PI).with_phase(0.4)).unwrap();
                assert!(out.matrix().max_abs_diff(down.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn pulse_matches_exponential_of_collective_operator() {
        let n = 3;
        let targets = vec![0, 2];
        for (axis, phase) in [(Axis::X, 0.0f64), (Axis::Y, 0.0), (Axis::Z, 0.0), (Axis::X, 0.7), (Axis::Y, -1.1)] {
            let theta = 1.234;
            let sx = collective_operator(OperatorKind::X, &targets, n).unwrap();
            let sy = collective_operator(OperatorKind::Y, &targets, n).unwrap();
            let sz = collective_operator(OperatorKind::Z, &targets, n).unwrap();
            let gen = match axis {
                Axis::X => &sx.scale(C64::new(phase.cos(), 0.0)) + &sy.scale(C64::new(phase.sin(), 0.0)),
                Axis::Y => &sx.scale(C64::new(-phase.sin(), 0.0)) + &sy.scale(C64::new(phase.cos(), 0.0)),
                Axis::Z => sz,
            };
            let oracle = propagator(&gen, theta).unwrap();
            let u = Pulse::new(targets.clone(), axis, theta).with_phase(phase).unitary(n).unwrap();
            assert!(u.max_abs_diff(&oracle) < 1e-12, "{axis:?} {phase}");
        }
    }

    #[test]
    fn two_half_pulses_make_a_full_one() {
        let rho = cat_state(3, CatWeights::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap()).unwrap();
        let half = Pulse::new(vec![1, 2], Axis::Y, FRAC_PI_2).with_phase(0.3);
        let full = Pulse::new(vec![1, 2], Axis::Y, PI).with_phase(0.3);
        let twice = apply_pulse(&apply_pulse(&rho, &half).unwrap(), &half).unwrap();
        let once = apply_pulse(&rho, &full).unwrap();
        assert!(twice.matrix().max_abs_diff(once.matrix()) < 1e-12);
    }

    #[test]
    fn evolve_cases() {
        let n = 2;
        let h = &collective_operator(OperatorKind::X, &[0, 1], n).unwrap().scale(C64::new(300.0, 0.0))
            + &collective_operator(OperatorKind::Z, &[0], n).unwrap().scale(C64::new(-120.0, 0.0));
        let rho = ferro_state(2, Ferro::Alive).unwrap();
        assert_eq!(evolve(&rho, &h, 0.0).unwrap(), rho);
        let half = evolve(&evolve(&rho, &h, 0.0035).unwrap(), &h, 0.0035).unwrap();
        let full = evolve(&rho, &h, 0.007).unwrap();
        assert!(half.matrix().max_abs_diff(full.matrix()) < 1e-10);
        assert!(matches!(evolve(&rho, &h, -1.0), Err(Error::NegativeTime(_))));

        let hz = collective_operator(OperatorKind::Z, &[0, 1], n).unwrap().scale(C64::new(1e3, 0.0));
        let diag = crate::states::decohered_mixture(1, CatWeights::balanced()).unwrap();
        assert!(evolve(&diag, &hz, 0.3).unwrap().matrix().max_abs_diff(diag.matrix()) < 1e-12);
    }

    #[test]
    fn rotate_z_matches_pulse() {
        let rho = cat_state(3, CatWeights::balanced()).unwrap();
        let angles = [0.3, -1.2, 2.0];
        let by_diag = rotate_z(&rho, &angles).unwrap();
        let mut by_pulse = rho.clone();
        for (s, &a) in angles.iter().enumerate() {
            by_pulse = apply_pulse(&by_pulse, &Pulse::new(vec![s], Axis::Z, a)).unwrap();
        }
        assert!(by_diag.matrix().max_abs_diff(by_pulse.matrix()) < 1e-12);
    }

    #[test]
    fn cnot_actions() {
        let n = 7;
        let targets: Vec<usize> = (1..7).collect();
        let up_u = ferro_state(n, Ferro::Alive).unwrap();
        let out = controlled_not_all(&up_u, SpinIndex::control(0), &targets).unwrap();
        assert_eq!(out, up_u);
        let down_d = ferro_state(n, Ferro::Dead).unwrap();
        let out = controlled_not_all(&down_d, SpinIndex::control(0), &targets).unwrap();
        let down_u = DensityMatrix::basis(crate::operator::basis_index(&[0], n), n).unwrap();
        assert_eq!(out, down_u);
        assert!(matches!(
            controlled_not_all(&up_u, SpinIndex::control(1), &targets),
            Err(Error::OverlappingSubsets(1))
        ));
    }

    #[test]
    fn cnot_permutation_matches_dense_unitary() {
        let rho = cat_state(4, CatWeights::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap()).unwrap();
        let rho = rotate_z(&apply_pulse(&rho, &Pulse::new(vec![1], Axis::X, 0.4)).unwrap(), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let u = controlled_not_unitary(4, 2, &[0, 3]).unwrap();
        let dense = rho.matrix().conjugate_by(&u);
        let fast = controlled_not_all(&rho, SpinIndex::control(2), &[0, 3]).unwrap();
        assert!(fast.matrix().max_abs_diff(&dense) < 1e-15);
    }
}
