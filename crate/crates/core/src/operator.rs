//! Dense complex matrices and spin-½ operators on an N-spin product basis.
//!
//! Basis convention: spin 0 is the most significant bit of a basis index,
//! bit value 0 is |↑⟩ and bit value 1 is |↓⟩. Every operator built here is
//! laid out in that order.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix whose dimension is a power of two.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {:?}", self.dim(), self.dim(), self.inner)
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { inner: DMatrix::zeros(dim, dim) })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { inner: DMatrix::identity(dim, dim) })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { inner: DMatrix::from_fn(dim, dim, f) })
    }

    /// Builds a matrix from entries given in row-major order.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Ok(Self { inner: DMatrix::from_row_slice(dim, dim, entries) })
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        let dim = diag.len();
        check_dim(dim)?;
        let mut inner = DMatrix::zeros(dim, dim);
        for (k, &v) in diag.iter().enumerate() {
            inner[(k, k)] = v;
        }
        Ok(Self { inner })
    }

    pub fn from_dmatrix(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare { rows: inner.nrows(), cols: inner.ncols() });
        }
        check_dim(inner.nrows())?;
        Ok(Self { inner })
    }

    /// Outer product |v⟩⟨v|.
    pub fn projector(v: &[C64]) -> Result<Self> {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    /// Number of spins spanned by this matrix (log2 of the dimension).
    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                out.push(self.inner[(r, c)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { inner: &self.inner * s }
    }

    pub fn map(&self, f: impl FnMut(C64) -> C64) -> Self {
        Self { inner: self.inner.map(f) }
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |M − M†|
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.inner[(r, c)] - self.inner[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product Tr(A† B).
    pub fn inner_product(&self, other: &Self) -> C64 {
        self.inner.iter().zip(other.inner.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for r in 0..d {
            for k in 0..d {
                acc += self.inner[(r, k)] * other.inner[(k, r)];
            }
        }
        acc
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self { inner: &u.inner * &self.inner * u.inner.adjoint() }
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Self) -> Self {
        Self { inner: &self.inner * &other.inner - &other.inner * &self.inner }
    }

    /// Real eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let err = self.hermiticity_error();
        let scale = self.max_abs().max(1.0);
        if err > 1e-10 * scale {
            return Err(Error::NotHermitian(err));
        }
        // Symmetrize so tiny asymmetries cannot leak into the decomposition.
        let sym = (&self.inner + self.inner.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::try_new(sym, 1e-15 * scale, 0).ok_or(Error::Eigen)?;
        let d = self.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, ComplexMatrix { inner: vectors }))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let err = self.hermiticity_error();
        let scale = self.max_abs().max(1.0);
        if err > 1e-10 * scale {
            return Err(Error::NotHermitian(err));
        }
        let sym = (&self.inner + self.inner.adjoint()) * C64::new(0.5, 0.0);
        let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim();
        (0..d).map(|r| (0..d).map(|c| self.inner[(r, c)] * v[c]).sum()).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.inner[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner * &rhs.inner }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner - &rhs.inner }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(())
}

/// Whether a spin acts as the control qubit or belongs to the cat system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinRole {
    Control,
    System,
}

/// A spin site together with its role in the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinIndex {
    pub site: usize,
    pub role: SpinRole,
}

impl SpinIndex {
    pub fn control(site: usize) -> Self {
        Self { site, role: SpinRole::Control }
    }

    pub fn system(site: usize) -> Self {
        Self { site, role: SpinRole::System }
    }
}

/// Single-spin operator species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl OperatorKind {
    /// The 2×2 matrix in the {|↑⟩, |↓⟩} basis.
    pub fn matrix2(self) -> [[C64; 2]; 2] {
        let h = C64::new(0.5, 0.0);
        let hi = C64::new(0.0, 0.5);
        match self {
            OperatorKind::X => [[ZERO, h], [h, ZERO]],
            OperatorKind::Y => [[ZERO, -hi], [hi, ZERO]],
            OperatorKind::Z => [[h, ZERO], [ZERO, -h]],
            OperatorKind::Plus => [[ZERO, ONE], [ZERO, ZERO]],
            OperatorKind::Minus => [[ZERO, ZERO], [ONE, ZERO]],
        }
    }
}

/// Bit mask of `site` inside an `n`-spin basis index.
#[inline]
pub fn site_mask(site: usize, n: usize) -> usize {
    1 << (n - 1 - site)
}

/// Whether spin `site` is |↓⟩ in basis state `index`.
#[inline]
pub fn is_down(index: usize, site: usize, n: usize) -> bool {
    index & site_mask(site, n) != 0
}

/// Twice the total Sz of a basis state (an integer in [−n, n]).
#[inline]
pub fn twice_magnetization(index: usize, n: usize) -> i32 {
    n as i32 - 2 * index.count_ones() as i32
}

/// Index of the basis state with the listed sites down and all others up.
pub fn basis_index(down_sites: &[usize], n: usize) -> usize {
    down_sites.iter().fold(0, |acc, &s| acc | site_mask(s, n))
}

/// Validates a site subset: non-empty, in range, no duplicates. Returns it sorted.
pub fn check_sites(sites: &[usize], n: usize) -> Result<Vec<usize>> {
    if sites.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateSite(w[0]));
        }
    }
    if let Some(&last) = sorted.last() {
        if last >= n {
            return Err(Error::SiteOutOfRange { site: last, n });
        }
    }
    Ok(sorted)
}

/// Tensor product a ⊗ b; `a` supplies the more significant index bits.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix { inner: a.inner.kronecker(&b.inner) }
}

fn embed_2x2(op: [[C64; 2]; 2], site: usize, n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let mask = site_mask(site, n);
    let mut m = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        let rb = usize::from(r & mask != 0);
        for cb in 0..2 {
            let v = op[rb][cb];
            if v != ZERO {
                let c = if cb == 1 { r | mask } else { r & !mask };
                m[(r, c)] = v;
            }
        }
    }
    ComplexMatrix { inner: m }
}

/// I ⊗ … ⊗ O ⊗ … ⊗ I with O acting on `site`.
pub fn single_spin_operator(kind: OperatorKind, site: usize, n: usize) -> Result<ComplexMatrix> {
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    Ok(embed_2x2(kind.matrix2(), site, n))
}

/// Sum of a single-spin operator over a set of sites.
pub fn collective_operator(kind: OperatorKind, sites: &[usize], n: usize) -> Result<ComplexMatrix> {
    let sites = check_sites(sites, n)?;
    let mut acc = ComplexMatrix::zeros(1 << n)?;
    for s in sites {
        acc = &acc + &embed_2x2(kind.matrix2(), s, n);
    }
    Ok(acc)
}

/// Π S⁺ over `sites` plus its adjoint Π S⁻: the highest-order coherence
/// operator of the chosen sites.
pub fn nq_coherence_operator(n: usize, sites: &[usize]) -> Result<ComplexMatrix> {
    let sites = check_sites(sites, n)?;
    let dim = 1usize << n;
    let mask = sites.iter().fold(0, |acc, &s| acc | site_mask(s, n));
    // Π S⁺ maps every state with all `sites` down to the same state with them up.
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        if c & mask == mask {
            let r = c & !mask;
            m[(r, c)] += ONE;
            m[(c, r)] += ONE;
        }
    }
    Ok(ComplexMatrix { inner: m })
}

/// U = exp(−iHt) for Hermitian `h` in rad/s, via eigendecomposition.
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let err = h.hermiticity_error();
    if err > 1e-10 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    if t == 0.0 {
        return ComplexMatrix::identity(h.dim());
    }
    let (values, vectors) = h.hermitian_eigen()?;
    let phases: Vec<C64> = values.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
    let d = h.dim();
    let scaled = DMatrix::from_fn(d, d, |r, c| vectors.inner[(r, c)] * phases[c]);
    Ok(ComplexMatrix { inner: scaled * vectors.inner.adjoint() })
}

/// Reduced matrix over the `keep` sites (returned in ascending site order).
pub fn partial_trace(rho: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = rho.n_spins();
    let keep = check_sites(keep, n)?;
    if keep.len() == n {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let spread = |sites: &[usize], k: usize| -> usize {
        let m = sites.len();
        sites
            .iter()
            .enumerate()
            .filter(|(j, _)| k & (1 << (m - 1 - j)) != 0)
            .fold(0, |acc, (_, &s)| acc | site_mask(s, n))
    };
    let kept_idx: Vec<usize> = (0..1usize << keep.len()).map(|k| spread(&keep, k)).collect();
    let traced_idx: Vec<usize> = (0..1usize << traced.len()).map(|t| spread(&traced, t)).collect();
    let dk = kept_idx.len();
    let mut out = DMatrix::zeros(dk, dk);
    for (i, &ki) in kept_idx.iter().enumerate() {
        for (j, &kj) in kept_idx.iter().enumerate() {
            out[(i, j)] = traced_idx.iter().map(|&t| rho.inner[(ki | t, kj | t)]).sum();
        }
    }
    Ok(ComplexMatrix { inner: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4).unwrap());
        let z = ComplexMatrix::from_diagonal(&[c(1.0), c(-1.0)]).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c(1.0), c(1.0), c(-1.0), c(-1.0)]).unwrap();
        assert_eq!(kron(&z, &i2), expected);
    }

    #[test]
    fn kron_sx_sx_on_up_up() {
        // Hand enumeration: (σx/2 ⊗ σx/2)|↑↑⟩ = ¼|↓↓⟩.
        let sx = single_spin_operator(OperatorKind::X, 0, 1).unwrap();
        let v = kron(&sx, &sx).apply(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(v, vec![ZERO, ZERO, ZERO, c(0.25)]);
    }

    #[test]
    fn single_spin_operators() {
        let z = single_spin_operator(OperatorKind::Z, 0, 1).unwrap();
        assert_eq!(z, ComplexMatrix::from_diagonal(&[c(0.5), c(-0.5)]).unwrap());
        let plus = single_spin_operator(OperatorKind::Plus, 0, 1).unwrap();
        assert_eq!(plus.apply(&[ZERO, ONE]), vec![ONE, ZERO]);
        let z1 = single_spin_operator(OperatorKind::Z, 1, 2).unwrap();
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert_eq!(z1, kron(&i2, &z));
        assert_eq!(
            z1,
            ComplexMatrix::from_diagonal(&[c(0.5), c(-0.5), c(0.5), c(-0.5)]).unwrap()
        );
        assert!(matches!(
            single_spin_operator(OperatorKind::X, 2, 2),
            Err(Error::SiteOutOfRange { site: 2, n: 2 })
        ));
    }

    #[test]
    fn plus_is_sx_plus_i_sy() {
        for n in 1..4 {
            for s in 0..n {
                let sx = single_spin_operator(OperatorKind::X, s, n).unwrap();
                let sy = single_spin_operator(OperatorKind::Y, s, n).unwrap();
                let plus = single_spin_operator(OperatorKind::Plus, s, n).unwrap();
                assert!(plus.max_abs_diff(&(&sx + &sy.scale(I))) < 1e-15);
                let minus = single_spin_operator(OperatorKind::Minus, s, n).unwrap();
                assert_eq!(minus, plus.adjoint());
            }
        }
    }

    #[test]
    fn su2_algebra() {
        for n in 1..5 {
            for s in 0..n {
                let sx = single_spin_operator(OperatorKind::X, s, n).unwrap();
                let sy = single_spin_operator(OperatorKind::Y, s, n).unwrap();
                let sz = single_spin_operator(OperatorKind::Z, s, n).unwrap();
                assert!(sx.commutator(&sy).max_abs_diff(&sz.scale(I)) < 1e-12);
                assert!(sy.commutator(&sz).max_abs_diff(&sx.scale(I)) < 1e-12);
                assert!(sz.commutator(&sx).max_abs_diff(&sy.scale(I)) < 1e-12);
            }
        }
    }

    #[test]
    fn nq_operator_single_and_pair() {
        let op = nq_coherence_operator(1, &[0]).unwrap();
        let sx = single_spin_operator(OperatorKind::X, 0, 1).unwrap();
        assert!(op.max_abs_diff(&sx.scale(c(2.0))) < 1e-15);

        // Direct product oracle S1+ S2+ + S1- S2-.
        let p0 = single_spin_operator(OperatorKind::Plus, 0, 2).unwrap();
        let p1 = single_spin_operator(OperatorKind::Plus, 1, 2).unwrap();
        let raise = &p0 * &p1;
        let oracle = &raise + &raise.adjoint();
        let op = nq_coherence_operator(2, &[0, 1]).unwrap();
        assert_eq!(op, oracle);
        assert_eq!(op[(0, 3)], ONE);
        assert_eq!(op[(3, 0)], ONE);
        assert!(matches!(nq_coherence_operator(2, &[]), Err(Error::EmptySubset)));
    }

    #[test]
    fn nq_operator_corners_only() {
        for n in 1..=8 {
            let all: Vec<usize> = (0..n).collect();
            let op = nq_coherence_operator(n, &all).unwrap();
            let d = 1 << n;
            let nonzero: Vec<(usize, usize)> = (0..d)
                .flat_map(|r| (0..d).map(move |c| (r, c)))
                .filter(|&(r, c)| op[(r, c)] != ZERO)
                .collect();
            if n == 1 {
                assert_eq!(nonzero, vec![(0, 1), (1, 0)]);
            } else {
                assert_eq!(nonzero, vec![(0, d - 1), (d - 1, 0)]);
            }
        }
    }

    #[test]
    fn nq_operator_subset_matches_product() {
        let n = 3;
        let mut raise = ComplexMatrix::identity(8).unwrap();
        for s in [0, 2] {
            raise = &raise * &single_spin_operator(OperatorKind::Plus, s, n).unwrap();
        }
        let oracle = &raise + &raise.adjoint();
        assert_eq!(nq_coherence_operator(n, &[2, 0]).unwrap(), oracle);
    }

    #[test]
    fn propagator_cases() {
        let h = single_spin_operator(OperatorKind::Z, 0, 1).unwrap().scale(c(2.0 * std::f64::consts::PI));
        assert_eq!(propagator(&h, 0.0).unwrap(), ComplexMatrix::identity(2).unwrap());
        let u = propagator(&h, 0.5).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[
            C64::from_polar(1.0, -std::f64::consts::FRAC_PI_2),
            C64::from_polar(1.0, std::f64::consts::FRAC_PI_2),
        ])
        .unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-12);
        let u1 = propagator(&h, 0.13).unwrap();
        let u2 = propagator(&h, 0.29).unwrap();
        assert!((&u1 * &u2).max_abs_diff(&propagator(&h, 0.42).unwrap()) < 1e-12);
    }

    #[test]
    fn propagator_rejects_non_hermitian() {
        let m = single_spin_operator(OperatorKind::Plus, 0, 1).unwrap();
        assert!(matches!(propagator(&m, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn partial_trace_product_state() {
        let a = ComplexMatrix::from_row_major(2, &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)])
            .unwrap();
        let b = ComplexMatrix::from_diagonal(&[c(0.25), c(0.75)]).unwrap();
        let ab = kron(&a, &b);
        assert!(partial_trace(&ab, &[0]).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, &[1]).unwrap().max_abs_diff(&b) < 1e-15);
        assert_eq!(partial_trace(&ab, &[0, 1]).unwrap(), ab);
        assert!(matches!(partial_trace(&ab, &[]), Err(Error::EmptySubset)));
    }

    #[test]
    fn partial_trace_middle_site() {
        // ρ = a ⊗ b ⊗ c; keeping site 1 must return b.
        let a = ComplexMatrix::from_diagonal(&[c(0.9), c(0.1)]).unwrap();
        let b = ComplexMatrix::from_row_major(2, &[c(0.4), C64::new(0.0, 0.3), C64::new(0.0, -0.3), c(0.6)])
            .unwrap();
        let cc = ComplexMatrix::from_diagonal(&[c(0.5), c(0.5)]).unwrap();
        let rho = kron(&kron(&a, &b), &cc);
        assert!(partial_trace(&rho, &[1]).unwrap().max_abs_diff(&b) < 1e-15);
        assert!(partial_trace(&rho, &[0, 2]).unwrap().max_abs_diff(&kron(&a, &cc)) < 1e-15);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(ComplexMatrix::zeros(3), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(ComplexMatrix::from_row_major(2, &[ONE]), Err(Error::DimensionMismatch { .. })));
    }
}
