#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spincat::dynamics::{CouplingKind, SpinSystem};
use spincat::{ComplexMatrix, DensityMatrix, SpinRole};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G G† / Tr for a Gaussian-ish random G: full rank, generic entries.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let d = 1 << n;
    let g: Vec<C> = (0..d * d).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut m = vec![C::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            m[r * d + c] = (0..d).map(|k| g[r * d + k] * g[c * d + k].conj()).sum();
        }
    }
    let tr: f64 = (0..d).map(|k| m[k * d + k].re).sum();
    for v in &mut m {
        *v /= tr;
    }
    DensityMatrix::new(ComplexMatrix::from_row_major(d, &m).unwrap()).unwrap()
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> SpinSystem {
    let offsets = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
    let mut sys = SpinSystem::new(vec![SpinRole::System; n], offsets).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            let kind = if rng.random_bool(0.5) { CouplingKind::HomonuclearDipolar } else { CouplingKind::HeteronuclearZz };
            sys.set_coupling(i, j, rng.random_range(-300.0..300.0), kind).unwrap();
        }
    }
    sys
}

/// Row-major dense matrix, kept separate from the library's own type so the
/// oracle shares no code with the implementation under test.
#[derive(Clone, Debug)]
pub struct Dense {
    pub d: usize,
    pub a: Vec<C>,
}

impl Dense {
    pub fn zeros(d: usize) -> Self {
        Self { d, a: vec![C::new(0.0, 0.0); d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for k in 0..d {
            m.a[k * d + k] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C]]) -> Self {
        let d = rows.len();
        Self { d, a: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.a[r * self.d + c]
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let d = self.d;
        let mut out = Dense::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let x = self.a[r * d + k];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    out.a[r * d + c] += x * o.a[k * d + c];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Dense {
        let d = self.d;
        let mut out = Dense::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.a[c * d + r] = self.a[r * d + c].conj();
            }
        }
        out
    }

    pub fn add(&self, o: &Dense, s: f64) -> Dense {
        Dense { d: self.d, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y * s).collect() }
    }

    pub fn scale(&self, s: C) -> Dense {
        Dense { d: self.d, a: self.a.iter().map(|x| x * s).collect() }
    }

    pub fn kron(&self, o: &Dense) -> Dense {
        let d = self.d * o.d;
        let mut out = Dense::zeros(d);
        for r1 in 0..self.d {
            for c1 in 0..self.d {
                for r2 in 0..o.d {
                    for c2 in 0..o.d {
                        out.a[(r1 * o.d + r2) * d + c1 * o.d + c2] = self.get(r1, c1) * o.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn from_library(m: &ComplexMatrix) -> Dense {
        Dense { d: m.dim(), a: m.to_row_major() }
    }

    pub fn max_diff(&self, m: &ComplexMatrix) -> f64 {
        let other = m.to_row_major();
        self.a.iter().zip(&other).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

pub fn sz() -> Dense {
    Dense::from_rows(&[&[C::new(0.5, 0.0), C::new(0.0, 0.0)], &[C::new(0.0, 0.0), C::new(-0.5, 0.0)]])
}

/// |↑⟩⟨↓|
pub fn splus() -> Dense {
    Dense::from_rows(&[&[C::new(0.0, 0.0), C::new(1.0, 0.0)], &[C::new(0.0, 0.0), C::new(0.0, 0.0)]])
}

pub fn sminus() -> Dense {
    splus().dagger()
}

/// Single-spin operator placed at `site` in an n-spin register, site 0 leftmost.
pub fn embed(op: &Dense, site: usize, n: usize) -> Dense {
    let mut out = Dense::identity(1);
    for s in 0..n {
        out = out.kron(if s == site { op } else { &IDENTITY2 });
    }
    out
}

static IDENTITY2: std::sync::LazyLock<Dense> = std::sync::LazyLock::new(|| Dense::identity(2));

fn lindblad_rhs(rho: &Dense, jumps: &[Dense], jdj: &[Dense]) -> Dense {
    let mut out = Dense::zeros(rho.d);
    for (l, ldl) in jumps.iter().zip(jdj) {
        out = out.add(&l.mul(rho).mul(&l.dagger()), 1.0);
        out = out.add(&ldl.mul(rho), -0.5);
        out = out.add(&rho.mul(ldl), -0.5);
    }
    out
}

/// Classical fourth-order Runge–Kutta integration of dρ/dt = Σ LρL† − ½{L†L, ρ}.
pub fn lindblad_rk4(rho0: &Dense, jumps: &[Dense], t: f64, steps: usize) -> Dense {
    let jdj: Vec<Dense> = jumps.iter().map(|l| l.dagger().mul(l)).collect();
    let h = t / steps as f64;
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs(&rho, jumps, &jdj);
        let k2 = lindblad_rhs(&rho.add(&k1, h / 2.0), jumps, &jdj);
        let k3 = lindblad_rhs(&rho.add(&k2, h / 2.0), jumps, &jdj);
        let k4 = lindblad_rhs(&rho.add(&k3, h), jumps, &jdj);
        rho = rho.add(&k1, h / 6.0).add(&k2, h / 3.0).add(&k3, h / 3.0).add(&k4, h / 6.0);
    }
    rho
}

/// Jump operators √γᵢ Szᵢ and, for κᵢ > 0, √κᵢ S⁺ᵢ and √κᵢ S⁻ᵢ.
pub fn jump_operators(gamma: &[f64], kappa: &[f64]) -> Vec<Dense> {
    let n = gamma.len();
    let mut out = Vec::new();
    for i in 0..n {
        if gamma[i] > 0.0 {
            out.push(embed(&sz(), i, n).scale(C::new(gamma[i].sqrt(), 0.0)));
        }
        if kappa[i] > 0.0 {
            out.push(embed(&splus(), i, n).scale(C::new(kappa[i].sqrt(), 0.0)));
            out.push(embed(&sminus(), i, n).scale(C::new(kappa[i].sqrt(), 0.0)));
        }
    }
    out
}

/// Trace, Hermiticity and positivity of a state produced by some map.
pub fn physical(rho: &DensityMatrix, tol: f64) -> Result<(), String> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(format!("trace {tr}"));
    }
    let herm = rho.matrix().hermiticity_error();
    if herm > tol {
        return Err(format!("hermiticity error {herm:e}"));
    }
    let min = rho.min_eigenvalue().map_err(|e| e.to_string())?;
    if min < -tol {
        return Err(format!("min eigenvalue {min:e}"));
    }
    Ok(())
}
