//! Named states of the cat-state experiment and their analysis: entropy,
//! overlap fidelity, coherence-order decomposition and pseudopure mixing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{check_sites, partial_trace, twice_magnetization, ComplexMatrix, C64, ONE, ZERO};

/// Eigenvalues below this are treated as zero when computing entropy.
pub const ENTROPY_CLAMP: f64 = 1e-14;

/// A Hermitian, unit-trace, positive semidefinite matrix on N spins.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    pseudopure_background: Option<f64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking trace and Hermiticity (both to 1e-10).
    ///
    /// Positivity needs an eigendecomposition; call [`DensityMatrix::validate`]
    /// when it matters.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::BadTrace(tr.re));
        }
        let herm = matrix.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Self { matrix, pseudopure_background: None })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix, pseudopure_background: None }
    }

    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        Self { matrix, pseudopure_background: self.pseudopure_background }
    }

    /// Pure state |ψ⟩⟨ψ| from a normalized state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::BadTrace(norm));
        }
        Ok(Self::from_matrix_unchecked(ComplexMatrix::projector(psi)?))
    }

    /// Projector onto a single product-basis state.
    pub fn basis(index: usize, n_spins: usize) -> Result<Self> {
        let dim = 1usize << n_spins;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut m = ComplexMatrix::zeros(dim)?;
        m[(index, index)] = ONE;
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn maximally_mixed(n_spins: usize) -> Result<Self> {
        let dim = 1usize << n_spins;
        let m = ComplexMatrix::identity(dim)?.scale(C64::new(1.0 / dim as f64, 0.0));
        Ok(Self { matrix: m, pseudopure_background: Some(1.0) })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn n_spins(&self) -> usize {
        self.matrix.n_spins()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Fraction of the identity mixed in, when the state was built as a pseudopure mixture.
    pub fn pseudopure_background(&self) -> Option<f64> {
        self.pseudopure_background
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Tr(ρ O).
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.matrix.trace_product(op)
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.matrix.inner_product(&self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.matrix.hermitian_eigenvalues()?[0])
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix.hermitian_eigenvalues()
    }

    /// Checks every invariant: unit trace and Hermiticity to 1e-10,
    /// smallest eigenvalue ≥ −1e-8.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::BadTrace(tr.re));
        }
        let herm = self.matrix.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let min = self.min_eigenvalue()?;
        if min < -1e-8 {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    /// Marginal state of the `keep` sites.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self::from_matrix_unchecked(partial_trace(&self.matrix, keep)?))
    }

    /// ⟨Σ Sz⟩ over all spins, read from the populations.
    pub fn total_magnetization(&self) -> f64 {
        let n = self.n_spins();
        (0..self.dim())
            .map(|k| self.matrix[(k, k)].re * 0.5 * twice_magnetization(k, n) as f64)
            .sum()
    }

    /// ⟨Σ Sz⟩ restricted to the listed sites.
    pub fn magnetization_of(&self, sites: &[usize]) -> Result<f64> {
        let n = self.n_spins();
        let sites = check_sites(sites, n)?;
        Ok((0..self.dim())
            .map(|k| {
                let m: f64 = sites
                    .iter()
                    .map(|&s| if crate::operator::is_down(k, s, n) { -0.5 } else { 0.5 })
                    .sum();
                self.matrix[(k, k)].re * m
            })
            .sum())
    }
}

/// Superposition weights a|u⟩ + b|d⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatWeights {
    a: C64,
    b: C64,
}

impl CatWeights {
    /// Rejects weights with | |a|² + |b|² − 1 | > 1e-9.
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 || !norm.is_finite() {
            return Err(Error::UnnormalizedWeights(norm));
        }
        // Renormalize so the stored pair meets the invariant to rounding.
        let s = norm.sqrt();
        Ok(Self { a: a / s, b: b / s })
    }

    /// Scales an arbitrary non-zero pair to unit norm.
    pub fn normalized(a: C64, b: C64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::UnnormalizedWeights(norm));
        }
        Ok(Self { a: a / norm, b: b / norm })
    }

    /// a = b = 1/√2.
    pub fn balanced() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { a: h, b: h }
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    /// −|a|² ln|a|² − |b|² ln|b|², the entropy of the fully decohered mixture.
    pub fn binary_entropy(&self) -> f64 {
        [self.a.norm_sqr(), self.b.norm_sqr()]
            .iter()
            .filter(|&&p| p > ENTROPY_CLAMP)
            .map(|&p| -p * p.ln())
            .sum()
    }
}

/// The two ferromagnetic corner states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ferro {
    /// |u⟩ = |↑↑…↑⟩
    Alive,
    /// |d⟩ = |↓↓…↓⟩
    Dead,
}

pub fn ferro_state(n: usize, which: Ferro) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("spin count must be at least 1".into()));
    }
    let index = match which {
        Ferro::Alive => 0,
        Ferro::Dead => (1 << n) - 1,
    };
    DensityMatrix::basis(index, n)
}

/// Pure projector onto a|u⟩ + b|d⟩ for n spins.
pub fn cat_state(n: usize, w: CatWeights) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("spin count must be at least 1".into()));
    }
    let dim = 1usize << n;
    let mut psi = vec![ZERO; dim];
    psi[0] = w.a;
    psi[dim - 1] += w.b;
    DensityMatrix::pure(&psi)
}

/// a|↑⟩|u⟩ + b|↓⟩|d⟩ on n + 1 spins, control qubit at site 0.
pub fn entangled_pair_state(n: usize, w: CatWeights) -> Result<DensityMatrix> {
    cat_state(n + 1, w)
}

/// |a|² |↑⟩⟨↑|⊗|u⟩⟨u| + |b|² |↓⟩⟨↓|⊗|d⟩⟨d| on n + 1 spins.
pub fn decohered_mixture(n: usize, w: CatWeights) -> Result<DensityMatrix> {
    let dim = 1usize << (n + 1);
    let mut m = ComplexMatrix::zeros(dim)?;
    m[(0, 0)] = C64::new(w.a.norm_sqr(), 0.0);
    m[(dim - 1, dim - 1)] = C64::new(w.b.norm_sqr(), 0.0);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// (1 − f)·I/2ⁿ + f·target.
pub fn pseudopure(n: usize, target: &DensityMatrix, purity_fraction: f64) -> Result<DensityMatrix> {
    let f = purity_fraction;
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::BadPurityFraction(f));
    }
    if target.n_spins() != n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: target.dim() });
    }
    let dim = target.dim();
    let bg = (1.0 - f) / dim as f64;
    let mut m = target.matrix().scale(C64::new(f, 0.0));
    for k in 0..dim {
        m[(k, k)] += C64::new(bg, 0.0);
    }
    let prior = target.pseudopure_background.unwrap_or(0.0);
    Ok(DensityMatrix { matrix: m, pseudopure_background: Some(1.0 - f + f * prior) })
}

/// Coherence order of element (row, col): total Sz of row minus that of col.
#[inline]
pub fn coherence_order(row: usize, col: usize) -> i32 {
    col.count_ones() as i32 - row.count_ones() as i32
}

/// Matrix elements grouped by coherence order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceDecomposition {
    dim: usize,
    entries: BTreeMap<i32, Vec<(usize, usize, C64)>>,
}

impl CoherenceDecomposition {
    /// Orders with at least one non-zero element.
    pub fn orders(&self) -> Vec<i32> {
        self.entries.keys().copied().collect()
    }

    /// Frobenius norm of the order-q component.
    pub fn weight(&self, q: i32) -> f64 {
        self.entries
            .get(&q)
            .map(|e| e.iter().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt())
            .unwrap_or(0.0)
    }

    pub fn weights(&self) -> BTreeMap<i32, f64> {
        self.entries.keys().map(|&q| (q, self.weight(q))).collect()
    }

    /// Dense matrix holding only the order-q elements.
    pub fn component(&self, q: i32) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim).expect("dimension checked at construction");
        if let Some(es) = self.entries.get(&q) {
            for &(r, c, v) in es {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Sum of all components.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim).expect("dimension checked at construction");
        for es in self.entries.values() {
            for &(r, c, v) in es {
                m[(r, c)] += v;
            }
        }
        m
    }
}

/// Splits a matrix into its coherence-order components.
pub fn coherence_orders(rho: &ComplexMatrix) -> CoherenceDecomposition {
    let dim = rho.dim();
    let mut entries: BTreeMap<i32, Vec<(usize, usize, C64)>> = BTreeMap::new();
    for r in 0..dim {
        for c in 0..dim {
            let v = rho[(r, c)];
            if v != ZERO {
                entries.entry(coherence_order(r, c)).or_default().push((r, c, v));
            }
        }
    }
    CoherenceDecomposition { dim, entries }
}

/// Frobenius weight per coherence order without materializing components.
pub fn coherence_weights(rho: &ComplexMatrix) -> BTreeMap<i32, f64> {
    let dim = rho.dim();
    let mut acc: BTreeMap<i32, f64> = BTreeMap::new();
    for r in 0..dim {
        for c in 0..dim {
            let v = rho[(r, c)];
            if v != ZERO {
                *acc.entry(coherence_order(r, c)).or_default() += v.norm_sqr();
            }
        }
    }
    acc.into_iter().map(|(q, s)| (q, s.sqrt())).collect()
}

/// Zeroes every element whose coherence order is not in `keep`.
pub fn strip_coherences(rho: &ComplexMatrix, keep: &[i32]) -> ComplexMatrix {
    let dim = rho.dim();
    let mut out = rho.clone();
    for r in 0..dim {
        for c in 0..dim {
            if !keep.contains(&coherence_order(r, c)) {
                out[(r, c)] = ZERO;
            }
        }
    }
    out
}

/// ⟨u|ρ|d⟩ for the corner states of `sites`, after tracing out every other spin.
pub fn nq_amplitude(rho: &DensityMatrix, sites: &[usize]) -> Result<C64> {
    let sites = check_sites(sites, rho.n_spins())?;
    let reduced = if sites.len() == rho.n_spins() {
        rho.matrix().clone()
    } else {
        partial_trace(rho.matrix(), &sites)?
    };
    Ok(reduced[(0, reduced.dim() - 1)])
}

/// −Σ λ ln λ in units of k_B.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l >= ENTROPY_CLAMP)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Overlap Tr(ρσ) with a rank-one target σ.
pub fn fidelity(rho: &DensityMatrix, target_pure: &DensityMatrix) -> Result<f64> {
    if rho.dim() != target_pure.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: target_pure.dim() });
    }
    if (target_pure.purity() - 1.0).abs() > 1e-8 || (target_pure.trace() - ONE).norm() > 1e-8 {
        return Err(Error::NotPure);
    }
    Ok(rho.matrix().trace_product(target_pure.matrix()).re.clamp(0.0, 1.0))
}
