mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use common::{physical, random_density, random_system, rng};
use spincat::dynamics::{
    apply_dephasing, apply_flip_relaxation, apply_pulse, build_hamiltonian, controlled_not_all, evolve, rotate_z, Axis,
    NoiseModel, Pulse,
};
use spincat::operator::{propagator, ComplexMatrix};
use spincat::states::{cat_state, coherence_orders, nq_amplitude, von_neumann_entropy};
use spincat::{CatWeights, SpinIndex, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn propagator_is_unitary(seed in any::<u64>(), n in 1usize..=4, t in 0.0f64..0.05) {
        let sys = random_system(&mut rng(seed), n);
        let u = propagator(&build_hamiltonian(&sys), t).unwrap();
        let eye = ComplexMatrix::identity(1 << n).unwrap();
        prop_assert!((&u * &u.adjoint()).max_abs_diff(&eye) < 1e-12);
    }

    #[test]
    fn channels_stay_physical(seed in any::<u64>(), n in 1usize..=4, gamma in 0.0f64..50.0, kappa in 0.0f64..5.0, t in 0.0f64..1.0) {
        let rho = random_density(&mut rng(seed), n);
        let noise = NoiseModel::uniform(n, gamma, kappa).unwrap();
        prop_assert!(physical(&apply_dephasing(&rho, &noise, t).unwrap(), 1e-10).is_ok());
        prop_assert!(physical(&apply_flip_relaxation(&rho, &noise, t).unwrap(), 1e-10).is_ok());
    }

    #[test]
    fn dephasing_preserves_diagonal(seed in any::<u64>(), n in 1usize..=4, gamma in 0.0f64..50.0, t in 0.0f64..1.0) {
        let rho = random_density(&mut rng(seed), n);
        let out = apply_dephasing(&rho, &NoiseModel::uniform(n, gamma, 0.0).unwrap(), t).unwrap();
        for k in 0..rho.dim() {
            prop_assert_eq!(out.matrix()[(k, k)], rho.matrix()[(k, k)]);
        }
    }

    #[test]
    fn cnot_is_an_involution(seed in any::<u64>(), n in 2usize..=5, control in 0usize..5) {
        let control = control % n;
        let rho = random_density(&mut rng(seed), n);
        let targets: Vec<usize> = (0..n).filter(|&s| s != control).collect();
        let once = controlled_not_all(&rho, SpinIndex::control(control), &targets).unwrap();
        let twice = controlled_not_all(&once, SpinIndex::control(control), &targets).unwrap();
        prop_assert_eq!(twice, rho);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=4, t in 0.0f64..0.05, angle in -PI..PI) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, n);
        let sys = random_system(&mut r, n);
        let s0 = von_neumann_entropy(&rho).unwrap();
        let evolved = evolve(&rho, &build_hamiltonian(&sys), t).unwrap();
        let pulsed = apply_pulse(&evolved, &Pulse::new((0..n).collect(), Axis::X, angle)).unwrap();
        prop_assert!((von_neumann_entropy(&pulsed).unwrap() - s0).abs() < 1e-10);
    }

    #[test]
    fn pulse_then_inverse_is_identity(seed in any::<u64>(), n in 1usize..=4, angle in -PI..PI, phase in -PI..PI) {
        let rho = random_density(&mut rng(seed), n);
        let p = Pulse::new((0..n).collect(), Axis::Y, angle).with_phase(phase);
        let back = Pulse::new((0..n).collect(), Axis::Y, -angle).with_phase(phase);
        let out = apply_pulse(&apply_pulse(&rho, &p).unwrap(), &back).unwrap();
        prop_assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn coherence_decomposition_reconstructs(seed in any::<u64>(), n in 1usize..=4) {
        let rho = random_density(&mut rng(seed), n);
        let dec = coherence_orders(rho.matrix());
        prop_assert_eq!(dec.reconstruct(), rho.matrix().clone());
        let total: f64 = dec.weights().values().map(|w| w * w).sum();
        prop_assert!((total.sqrt() - rho.matrix().frobenius_norm()).abs() < 1e-12);
    }
}

#[test]
fn collective_z_rotation_matches_single_spin_rotation() {
    for n in 2..=7usize {
        let rho = cat_state(n, CatWeights::balanced()).unwrap();
        let sites: Vec<usize> = (0..n).collect();
        for k in 0..16 {
            let phi = -PI + 2.0 * PI * k as f64 / 16.0;
            let all = rotate_z(&rho, &vec![phi; n]).unwrap();
            let mut one = vec![0.0; n];
            one[k % n] = n as f64 * phi;
            let single = rotate_z(&rho, &one).unwrap();
            let a = nq_amplitude(&all, &sites).unwrap();
            assert!((a - nq_amplitude(&single, &sites).unwrap()).norm() < 1e-12);
            assert!((a - C64::from_polar(0.5, -(n as f64) * phi)).norm() < 1e-12);
        }
    }
}
