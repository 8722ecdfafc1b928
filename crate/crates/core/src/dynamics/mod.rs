//! Hamiltonians, ideal pulses and gates, and decoherence channels.

mod gates;
mod monte_carlo;
mod noise;
mod system;

pub use gates::{apply_pulse, controlled_not_all, controlled_not_unitary, evolve, rotate_z, Axis, Pulse};
pub(crate) use gates::permute_involution;
pub use monte_carlo::{apply_phase_kicks_mc, trajectory_phases};
pub use noise::{apply_dephasing, apply_flip_relaxation, apply_relaxation, NoiseModel};
pub use system::{build_hamiltonian, Coupling, CouplingKind, SpinSystem};
