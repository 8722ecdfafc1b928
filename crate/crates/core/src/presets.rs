//! A seven-spin benzene-like cluster (one control carbon, six ring protons)
//! with representative coupling constants.
//!
//! The coupling values are non-physical defaults chosen to give the ring its
//! ortho/meta/para structure; they are not measured constants.

use crate::dynamics::{CouplingKind, SpinSystem};
use crate::operator::SpinRole;
use crate::protocol::{calibrated_noise, ProtocolConfig};
use crate::states::CatWeights;

/// Lifetime of the seven-spin coherence used for calibration, seconds.
pub const NQ_LIFETIME: f64 = 0.029;
/// Lifetime of the diagonal (population) signal used for calibration, seconds.
pub const POPULATION_LIFETIME: f64 = 0.49;
/// Default decoherence delays for demonstration runs, seconds.
pub const SHOWCASE_DELAYS: [f64; 3] = [0.0, 0.1, 0.2];
/// Default Lorentzian full width, Hz.
pub const DEFAULT_LINEWIDTH_HZ: f64 = 2.0;

/// Proton–proton dipolar couplings (Hz) by ring separation: ortho, meta, para.
pub const HH_COUPLINGS_HZ: [f64; 3] = [-640.0, -115.0, -80.0];
/// Carbon–proton couplings (Hz) to the bonded, ortho, meta and para protons.
pub const CH_COUPLINGS_HZ: [f64; 4] = [-1050.0, -180.0, -45.0, -30.0];

/// Site 0 is the carbon control spin; sites 1..=6 are ring protons, with
/// proton 1 bonded to the carbon.
pub fn benzene_system() -> SpinSystem {
    let mut roles = vec![SpinRole::Control];
    roles.extend([SpinRole::System; 6]);
    let labels = std::iter::once("C1".to_string()).chain((1..=6).map(|k| format!("H{k}"))).collect();
    let mut sys = SpinSystem::new(roles, vec![0.0; 7])
        .and_then(|s| s.with_labels(labels))
        .expect("static layout");
    for i in 1..=6usize {
        let ring = ring_separation(1, i);
        sys.set_coupling(0, i, CH_COUPLINGS_HZ[ring], CouplingKind::HeteronuclearZz)
            .expect("static layout");
        for j in i + 1..=6 {
            sys.set_coupling(i, j, HH_COUPLINGS_HZ[ring_separation(i, j) - 1], CouplingKind::HomonuclearDipolar)
                .expect("static layout");
        }
    }
    sys
}

fn ring_separation(i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(6 - d)
}

/// Balanced cat weights, unit purity, zero delay, noise calibrated to the two
/// reference lifetimes, flip relaxation off.
pub fn benzene_config() -> ProtocolConfig {
    let noise = calibrated_noise(7, NQ_LIFETIME, POPULATION_LIFETIME, false).expect("positive lifetimes");
    ProtocolConfig::new(benzene_system(), noise, CatWeights::balanced()).expect("static layout")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let sys = benzene_system();
        assert_eq!(sys.n_spins(), 7);
        assert_eq!(sys.control().unwrap().site, 0);
        assert_eq!(sys.couplings().count(), 6 + 15);
        assert_eq!(sys.coupling(0, 1).unwrap().hz, CH_COUPLINGS_HZ[0]);
        assert_eq!(sys.coupling(0, 4).unwrap().hz, CH_COUPLINGS_HZ[3]);
        assert_eq!(sys.coupling(2, 6).unwrap().hz, HH_COUPLINGS_HZ[1]);
        assert_eq!(sys.coupling(1, 4).unwrap().hz, HH_COUPLINGS_HZ[2]);
        assert_eq!(sys.coupling(6, 1).unwrap().hz, HH_COUPLINGS_HZ[0]);
    }
}
