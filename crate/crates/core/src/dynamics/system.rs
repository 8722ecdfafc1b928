use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{site_mask, ComplexMatrix, SpinIndex, SpinRole, C64};

/// Functional form of a pairwise coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// Secular like-spin dipolar term 2SzSz − SxSx − SySy.
    HomonuclearDipolar,
    /// Truncated unlike-spin term 2SzSz.
    HeteronuclearZz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// Strength in Hz.
    pub hz: f64,
    pub kind: CouplingKind,
}

/// Spins, their roles and offsets, and the pairwise coupling table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    labels: Vec<String>,
    roles: Vec<SpinRole>,
    offsets_hz: Vec<f64>,
    #[serde(with = "coupling_list")]
    couplings: BTreeMap<(usize, usize), Coupling>,
}

/// Serializes the coupling table as a list of `{i, j, hz, kind}` records,
/// since tuple keys are not representable in most text formats.
mod coupling_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{Coupling, CouplingKind};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        i: usize,
        j: usize,
        hz: f64,
        kind: CouplingKind,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<(usize, usize), Coupling>, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<Entry> = map.iter().map(|(&(i, j), c)| Entry { i, j, hz: c.hz, kind: c.kind }).collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), Coupling>, D::Error> {
        let list = Vec::<Entry>::deserialize(d)?;
        Ok(list.into_iter().map(|e| ((e.i.min(e.j), e.i.max(e.j)), Coupling { hz: e.hz, kind: e.kind })).collect())
    }
}

impl SpinSystem {
    pub fn new(roles: Vec<SpinRole>, offsets_hz: Vec<f64>) -> Result<Self> {
        if roles.is_empty() {
            return Err(Error::InvalidSystem("no spins".into()));
        }
        if roles.len() != offsets_hz.len() {
            return Err(Error::InvalidSystem(format!(
                "{} roles but {} offsets",
                roles.len(),
                offsets_hz.len()
            )));
        }
        if let Some(bad) = offsets_hz.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem(format!("non-finite offset {bad}")));
        }
        let labels = (0..roles.len()).map(|k| format!("S{k}")).collect();
        Ok(Self { labels, roles, offsets_hz, couplings: BTreeMap::new() })
    }

    /// `n` system spins, no control, zero offsets, no couplings.
    pub fn uncoupled(n: usize) -> Result<Self> {
        Self::new(vec![SpinRole::System; n], vec![0.0; n])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.roles.len() {
            return Err(Error::InvalidSystem(format!(
                "{} labels for {} spins",
                labels.len(),
                self.roles.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Sets the coupling between two distinct spins, replacing any previous entry.
    pub fn with_coupling(mut self, i: usize, j: usize, hz: f64, kind: CouplingKind) -> Result<Self> {
        self.set_coupling(i, j, hz, kind)?;
        Ok(self)
    }

    pub fn set_coupling(&mut self, i: usize, j: usize, hz: f64, kind: CouplingKind) -> Result<()> {
        let n = self.n_spins();
        for s in [i, j] {
            if s >= n {
                return Err(Error::SiteOutOfRange { site: s, n });
            }
        }
        if i == j {
            return Err(Error::InvalidSystem(format!("self-coupling on spin {i}")));
        }
        if !hz.is_finite() {
            return Err(Error::InvalidSystem(format!("non-finite coupling {hz}")));
        }
        self.couplings.insert((i.min(j), i.max(j)), Coupling { hz, kind });
        Ok(())
    }

    pub fn n_spins(&self) -> usize {
        self.roles.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn roles(&self) -> &[SpinRole] {
        &self.roles
    }

    pub fn offsets_hz(&self) -> &[f64] {
        &self.offsets_hz
    }

    /// Coupling between `i` and `j` in either order.
    pub fn coupling(&self, i: usize, j: usize) -> Option<Coupling> {
        self.couplings.get(&(i.min(j), i.max(j))).copied()
    }

    /// All couplings as (i, j, coupling) with i < j.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, Coupling)> + '_ {
        self.couplings.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn control_sites(&self) -> Vec<usize> {
        self.sites_with(SpinRole::Control)
    }

    pub fn system_sites(&self) -> Vec<usize> {
        self.sites_with(SpinRole::System)
    }

    fn sites_with(&self, role: SpinRole) -> Vec<usize> {
        self.roles.iter().enumerate().filter(|(_, &r)| r == role).map(|(k, _)| k).collect()
    }

    /// The unique control spin; errors unless exactly one exists.
    pub fn control(&self) -> Result<SpinIndex> {
        match self.control_sites().as_slice() {
            [site] => Ok(SpinIndex::control(*site)),
            other => Err(Error::InvalidSystem(format!(
                "expected exactly one control spin, found {}",
                other.len()
            ))),
        }
    }

    /// Copy with every coupling that touches a `decoupled` spin removed.
    pub fn decoupled(&self, decoupled: &[usize]) -> SpinSystem {
        let mut out = self.clone();
        out.couplings.retain(|&(i, j), _| !decoupled.contains(&i) && !decoupled.contains(&j));
        out
    }
}

/// H = Σ 2πνᵢ Szᵢ + Σ_{i<j} 2π dᵢⱼ Tᵢⱼ in rad/s.
pub fn build_hamiltonian(sys: &SpinSystem) -> ComplexMatrix {
    let n = sys.n_spins();
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim).expect("power-of-two dimension");
    let sz = |k: usize, s: usize| if k & site_mask(s, n) != 0 { -0.5 } else { 0.5 };
    for k in 0..dim {
        let mut diag = 0.0;
        for (s, &nu) in sys.offsets_hz.iter().enumerate() {
            diag += 2.0 * PI * nu * sz(k, s);
        }
        for (i, j, c) in sys.couplings() {
            diag += 2.0 * PI * c.hz * 2.0 * sz(k, i) * sz(k, j);
        }
        h[(k, k)] = C64::new(diag, 0.0);
    }
    // −(SxSx + SySy) = −½(S⁺S⁻ + S⁻S⁺): flip-flop between antiparallel pairs.
    for (i, j, c) in sys.couplings() {
        if c.kind != CouplingKind::HomonuclearDipolar {
            continue;
        }
        let (mi, mj) = (site_mask(i, n), site_mask(j, n));
        for k in 0..dim {
            if (k & mi != 0) != (k & mj != 0) {
                let partner = k ^ mi ^ mj;
                h[(k, partner)] += C64::new(-PI * c.hz, 0.0);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let sys = SpinSystem::new(vec![SpinRole::Control, SpinRole::System], vec![1.0, -2.0])
            .unwrap()
            .with_coupling(0, 1, 75.0, CouplingKind::HeteronuclearZz)
            .unwrap();
        let text = serde_json::to_string(&sys).unwrap();
        assert_eq!(serde_json::from_str::<SpinSystem>(&text).unwrap(), sys);
    }
    use crate::operator::{single_spin_operator, OperatorKind};

    fn op(kind: OperatorKind, s: usize, n: usize) -> ComplexMatrix {
        single_spin_operator(kind, s, n).unwrap()
    }

    #[test]
    fn empty_hamiltonian_is_zero() {
        let sys = SpinSystem::uncoupled(3).unwrap();
        assert_eq!(build_hamiltonian(&sys).max_abs(), 0.0);
    }

    #[test]
    fn heteronuclear_pair() {
        let sys = SpinSystem::uncoupled(2)
            .unwrap()
            .with_coupling(0, 1, 100.0, CouplingKind::HeteronuclearZz)
            .unwrap();
        let w = 2.0 * PI * 50.0;
        let expected = ComplexMatrix::from_diagonal(&[
            C64::new(w, 0.0),
            C64::new(-w, 0.0),
            C64::new(-w, 0.0),
            C64::new(w, 0.0),
        ])
        .unwrap();
        assert!(build_hamiltonian(&sys).max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn matches_operator_products() {
        let n = 3;
        let sys = SpinSystem::new(vec![SpinRole::Control, SpinRole::System, SpinRole::System], vec![12.0, -3.5, 40.0])
            .unwrap()
            .with_coupling(1, 2, 230.0, CouplingKind::HomonuclearDipolar)
            .unwrap()
            .with_coupling(0, 2, -75.0, CouplingKind::HeteronuclearZz)
            .unwrap()
            .with_coupling(1, 0, 18.0, CouplingKind::HeteronuclearZz)
            .unwrap();
        let mut oracle = ComplexMatrix::zeros(8).unwrap();
        for (s, &nu) in [12.0, -3.5, 40.0].iter().enumerate() {
            oracle = &oracle + &op(OperatorKind::Z, s, n).scale(C64::new(2.0 * PI * nu, 0.0));
        }
        let zz = |i, j| &op(OperatorKind::Z, i, n) * &op(OperatorKind::Z, j, n);
        let xx = |i, j| &op(OperatorKind::X, i, n) * &op(OperatorKind::X, j, n);
        let yy = |i, j| &op(OperatorKind::Y, i, n) * &op(OperatorKind::Y, j, n);
        let homo = &(&zz(1, 2).scale(C64::new(2.0, 0.0)) - &xx(1, 2)) - &yy(1, 2);
        oracle = &oracle + &homo.scale(C64::new(2.0 * PI * 230.0, 0.0));
        oracle = &oracle + &zz(0, 2).scale(C64::new(2.0 * PI * -75.0 * 2.0, 0.0));
        oracle = &oracle + &zz(0, 1).scale(C64::new(2.0 * PI * 18.0 * 2.0, 0.0));
        let h = build_hamiltonian(&sys);
        assert!(h.max_abs_diff(&oracle) < 1e-9);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn homonuclear_conserves_total_sz() {
        let sys = SpinSystem::uncoupled(2)
            .unwrap()
            .with_coupling(0, 1, 500.0, CouplingKind::HomonuclearDipolar)
            .unwrap();
        let h = build_hamiltonian(&sys);
        let sz = &op(OperatorKind::Z, 0, 2) + &op(OperatorKind::Z, 1, 2);
        assert!(h.commutator(&sz).max_abs() < 1e-9);
    }

    #[test]
    fn coupling_table_validation() {
        let sys = SpinSystem::uncoupled(2).unwrap();
        assert!(sys.clone().with_coupling(0, 0, 1.0, CouplingKind::HeteronuclearZz).is_err());
        assert!(sys.clone().with_coupling(0, 2, 1.0, CouplingKind::HeteronuclearZz).is_err());
        let sys = sys.with_coupling(1, 0, 7.0, CouplingKind::HeteronuclearZz).unwrap();
        assert_eq!(sys.coupling(0, 1), sys.coupling(1, 0));
        assert!(sys.decoupled(&[0]).coupling(0, 1).is_none());
    }

    #[test]
    fn control_lookup() {
        let sys = SpinSystem::new(vec![SpinRole::System, SpinRole::Control], vec![0.0; 2]).unwrap();
        assert_eq!(sys.control().unwrap().site, 1);
        let two = SpinSystem::new(vec![SpinRole::Control; 2], vec![0.0; 2]).unwrap();
        assert!(two.control().is_err());
        assert!(SpinSystem::uncoupled(2).unwrap().control().is_err());
    }
}
