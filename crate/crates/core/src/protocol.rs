//! The five-step recovery experiment: pseudopure initialization, cat
//! creation, entanglement with a control qubit, decoherence delay, and a
//! controlled-NOT that uses the control qubit's record to restore the
//! all-up state of the system spins.
//!
//! Steps B, C and E are exact unitaries with fixed matrix actions (control
//! qubit written first, |u⟩/|d⟩ the all-up/all-down system states):
//!
//! * B acts as I ⊗ V with V|u⟩ = a|u⟩ + b|d⟩, V|d⟩ = −b*|u⟩ + a*|d⟩,
//!   identity on every other system state;
//! * C swaps |↑⟩|d⟩ and |↓⟩|d⟩ and fixes all other basis states;
//! * E flips every system spin when the control is |↓⟩.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    apply_flip_relaxation, apply_phase_kicks_mc, apply_relaxation, controlled_not_all, permute_involution,
    NoiseModel, SpinSystem,
};
use crate::error::{Error, Result};
use crate::operator::{site_mask, ComplexMatrix, SpinIndex, C64, ONE, ZERO};
use crate::states::{coherence_weights, fidelity, nq_amplitude, pseudopure, von_neumann_entropy, CatWeights, DensityMatrix};

/// Which representation of the decoherence delay to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Closed-form dephasing channel.
    #[default]
    Analytic,
    /// Gaussian phase kicks with variance γᵢ·delay, averaged over trajectories.
    MonteCarlo,
}

/// Step preparation route. Only exact unitaries are implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreparationMode {
    #[default]
    ExactUnitary,
    /// Placeholder for pulse-sequence realizations of steps B and C.
    Sequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub sys: SpinSystem,
    pub noise: NoiseModel,
    pub weights: CatWeights,
    /// Decoherence delay in seconds.
    pub delay: f64,
    pub purity_fraction: f64,
    pub include_flip_relaxation: bool,
    pub noise_mode: NoiseMode,
    pub preparation: PreparationMode,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(sys: SpinSystem, noise: NoiseModel, weights: CatWeights) -> Result<Self> {
        let cfg = Self {
            sys,
            noise,
            weights,
            delay: 0.0,
            purity_fraction: 1.0,
            include_flip_relaxation: false,
            noise_mode: NoiseMode::Analytic,
            preparation: PreparationMode::ExactUnitary,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_delay(mut self, delay: f64) -> Self {
        self.delay = delay;
        self
    }

    pub fn with_purity_fraction(mut self, f: f64) -> Self {
        self.purity_fraction = f;
        self
    }

    pub fn with_flip_relaxation(mut self, on: bool) -> Self {
        self.include_flip_relaxation = on;
        self
    }

    pub fn with_noise_mode(mut self, mode: NoiseMode) -> Self {
        self.noise_mode = mode;
        self
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sys.control()?;
        if self.sys.system_sites().is_empty() {
            return Err(Error::InvalidSystem("no system spins".into()));
        }
        if self.noise.n_spins() != self.sys.n_spins() {
            return Err(Error::DimensionMismatch { expected: self.sys.n_spins(), found: self.noise.n_spins() });
        }
        if self.delay < 0.0 || !self.delay.is_finite() {
            return Err(Error::NegativeTime(self.delay));
        }
        if !(self.purity_fraction > 0.0 && self.purity_fraction <= 1.0) {
            return Err(Error::BadPurityFraction(self.purity_fraction));
        }
        if self.preparation == PreparationMode::Sequence {
            return Err(Error::InvalidParameter("sequence preparation mode is not implemented".into()));
        }
        Ok(())
    }

    fn register(&self) -> Result<Register> {
        self.validate()?;
        Register::new(&self.sys)
    }
}

/// Index bookkeeping for one control spin plus the system spins.
#[derive(Debug, Clone)]
struct Register {
    n: usize,
    control: usize,
    system: Vec<usize>,
    control_mask: usize,
    system_mask: usize,
}

impl Register {
    fn new(sys: &SpinSystem) -> Result<Self> {
        let n = sys.n_spins();
        let control = sys.control()?.site;
        let system = sys.system_sites();
        let system_mask = system.iter().fold(0, |acc, &s| acc | site_mask(s, n));
        Ok(Self { n, control, system, control_mask: site_mask(control, n), system_mask })
    }

    fn up_u(&self) -> usize {
        0
    }
    fn up_d(&self) -> usize {
        self.system_mask
    }
    fn down_u(&self) -> usize {
        self.control_mask
    }
    fn down_d(&self) -> usize {
        self.control_mask | self.system_mask
    }

    fn pure(&self, amplitudes: &[(usize, C64)]) -> Result<DensityMatrix> {
        let mut psi = vec![ZERO; 1 << self.n];
        for &(k, a) in amplitudes {
            psi[k] += a;
        }
        DensityMatrix::pure(&psi)
    }

    /// Noise-free target state after each step.
    fn ideal(&self, step: Step, w: CatWeights) -> Result<DensityMatrix> {
        match step {
            Step::A => self.pure(&[(self.up_u(), ONE)]),
            Step::B => self.pure(&[(self.up_u(), w.a()), (self.up_d(), w.b())]),
            Step::C | Step::D => self.pure(&[(self.up_u(), w.a()), (self.down_d(), w.b())]),
            Step::E => self.pure(&[(self.up_u(), w.a()), (self.down_u(), w.b())]),
        }
    }

    /// Σ ρₖₖ · (±1 for control ↑/↓) · Σ Sz over system spins.
    fn resolved_polarization(&self, rho: &DensityMatrix) -> f64 {
        let m = rho.matrix();
        (0..rho.dim())
            .map(|k| {
                let sign = if k & self.control_mask != 0 { -1.0 } else { 1.0 };
                let downs = (k & self.system_mask).count_ones() as f64;
                let sz = 0.5 * self.system.len() as f64 - downs;
                m[(k, k)].re * sign * sz
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    A,
    B,
    C,
    D,
    E,
}

pub fn step_a_initialize(cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    let reg = cfg.register()?;
    let target = DensityMatrix::basis(reg.up_u(), reg.n)?;
    if cfg.purity_fraction == 1.0 {
        return Ok(target);
    }
    pseudopure(reg.n, &target, cfg.purity_fraction)
}

/// Conjugates ρ by a unitary acting as the 2×2 matrix `v` on each listed
/// pair of basis states (p, q) and as the identity elsewhere.
fn conjugate_two_level(rho: &DensityMatrix, pairs: &[(usize, usize)], v: [[C64; 2]; 2]) -> DensityMatrix {
    let mut m = rho.matrix().clone();
    let dim = m.dim();
    for &(p, q) in pairs {
        for c in 0..dim {
            let (xp, xq) = (m[(p, c)], m[(q, c)]);
            m[(p, c)] = v[0][0] * xp + v[0][1] * xq;
            m[(q, c)] = v[1][0] * xp + v[1][1] * xq;
        }
    }
    for &(p, q) in pairs {
        for r in 0..dim {
            let (xp, xq) = (m[(r, p)], m[(r, q)]);
            m[(r, p)] = xp * v[0][0].conj() + xq * v[0][1].conj();
            m[(r, q)] = xp * v[1][0].conj() + xq * v[1][1].conj();
        }
    }
    rho.with_matrix(m)
}

fn step_b_matrix(w: CatWeights) -> [[C64; 2]; 2] {
    [[w.a(), -w.b().conj()], [w.b(), w.a().conj()]]
}

/// |↑⟩|u⟩ → |↑⟩(a|u⟩ + b|d⟩), leaving the control qubit untouched.
pub fn step_b_create_cat(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    let reg = cfg.register()?;
    check_size(rho, &reg)?;
    let pairs = [(reg.up_u(), reg.up_d()), (reg.down_u(), reg.down_d())];
    Ok(conjugate_two_level(rho, &pairs, step_b_matrix(cfg.weights)))
}

/// Dense matrix of step B.
pub fn step_b_unitary(cfg: &ProtocolConfig) -> Result<ComplexMatrix> {
    let reg = cfg.register()?;
    let v = step_b_matrix(cfg.weights);
    let mut u = ComplexMatrix::identity(1 << reg.n)?;
    for (p, q) in [(reg.up_u(), reg.up_d()), (reg.down_u(), reg.down_d())] {
        u[(p, p)] = v[0][0];
        u[(p, q)] = v[0][1];
        u[(q, p)] = v[1][0];
        u[(q, q)] = v[1][1];
    }
    Ok(u)
}

/// |↑⟩(a|u⟩ + b|d⟩) → a|↑⟩|u⟩ + b|↓⟩|d⟩.
pub fn step_c_entangle(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    let reg = cfg.register()?;
    check_size(rho, &reg)?;
    Ok(apply_step_c(rho, &reg))
}

fn apply_step_c(rho: &DensityMatrix, reg: &Register) -> DensityMatrix {
    let (p, q) = (reg.up_d(), reg.down_d());
    permute_involution(rho, |x| {
        if x == p {
            q
        } else if x == q {
            p
        } else {
            x
        }
    })
}

/// Inverse of step C. The swap is its own inverse.
pub fn step_c_inverse(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    step_c_entangle(rho, cfg)
}

/// Dense matrix of step C.
pub fn step_c_unitary(cfg: &ProtocolConfig) -> Result<ComplexMatrix> {
    let reg = cfg.register()?;
    let (p, q) = (reg.up_d(), reg.down_d());
    ComplexMatrix::from_fn(1 << reg.n, |r, c| {
        let image = if c == p {
            q
        } else if c == q {
            p
        } else {
            c
        };
        if r == image {
            ONE
        } else {
            ZERO
        }
    })
}

/// Decoherence (and optional flip relaxation) over `cfg.delay`.
pub fn step_d_decohere(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    let reg = cfg.register()?;
    check_size(rho, &reg)?;
    let t = cfg.delay;
    match cfg.noise_mode {
        NoiseMode::Analytic => apply_relaxation(rho, &cfg.noise, t, cfg.include_flip_relaxation),
        NoiseMode::MonteCarlo => {
            let kicks = cfg.noise.clone().with_monte_carlo(cfg.noise.diffusion_sigmas(t), cfg.noise.mc_trajectories())?;
            let out = apply_phase_kicks_mc(rho, &kicks, cfg.seed)?;
            if cfg.include_flip_relaxation {
                apply_flip_relaxation(&out, &cfg.noise, t)
            } else {
                Ok(out)
            }
        }
    }
}

/// Controlled-NOT from the control spin onto every system spin.
pub fn step_e_resurrect(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<DensityMatrix> {
    let reg = cfg.register()?;
    check_size(rho, &reg)?;
    controlled_not_all(rho, SpinIndex::control(reg.control), &reg.system)
}

fn check_size(rho: &DensityMatrix, reg: &Register) -> Result<()> {
    if rho.n_spins() != reg.n {
        return Err(Error::DimensionMismatch { expected: 1 << reg.n, found: rho.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderWeight {
    pub order: i32,
    pub weight: f64,
}

/// Observables recorded after one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: Step,
    /// Overlap with the step's noise-free pure target.
    pub fidelity: f64,
    pub coherence_weights: Vec<OrderWeight>,
    pub entropy_total: f64,
    pub entropy_control: f64,
    pub entropy_system: f64,
    pub total_magnetization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub delay: f64,
    pub steps: Vec<StepRecord>,
    /// Overlap of the system spins' marginal with |u⟩ after step E.
    pub final_system_fidelity: f64,
    pub final_control_entropy: f64,
    pub final_control_populations: [f64; 2],
    /// ⟨Σ Sz⟩ over the system spins after step E.
    pub final_system_polarization: f64,
    pub final_total_magnetization: f64,
}

fn record(step: Step, rho: &DensityMatrix, reg: &Register, w: CatWeights) -> Result<StepRecord> {
    let ideal = reg.ideal(step, w)?;
    Ok(StepRecord {
        step,
        fidelity: fidelity(rho, &ideal)?,
        coherence_weights: coherence_weights(rho.matrix())
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(order, weight)| OrderWeight { order, weight })
            .collect(),
        entropy_total: von_neumann_entropy(rho)?,
        entropy_control: von_neumann_entropy(&rho.reduce(&[reg.control])?)?,
        entropy_system: von_neumann_entropy(&rho.reduce(&reg.system)?)?,
        total_magnetization: rho.total_magnetization(),
    })
}

/// Runs A → B → C → D → E and returns the state after every step.
pub fn run_states(cfg: &ProtocolConfig) -> Result<Vec<(Step, DensityMatrix)>> {
    let a = step_a_initialize(cfg)?;
    let b = step_b_create_cat(&a, cfg)?;
    let c = step_c_entangle(&b, cfg)?;
    let d = step_d_decohere(&c, cfg)?;
    let e = step_e_resurrect(&d, cfg)?;
    Ok(vec![(Step::A, a), (Step::B, b), (Step::C, c), (Step::D, d), (Step::E, e)])
}

pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolReport> {
    let reg = cfg.register()?;
    let states = run_states(cfg)?;
    let steps = states
        .iter()
        .map(|(step, rho)| record(*step, rho, &reg, cfg.weights))
        .collect::<Result<Vec<_>>>()?;
    let (_, last) = states.last().expect("five steps");
    let system = last.reduce(&reg.system)?;
    let up = DensityMatrix::basis(0, reg.system.len())?;
    let control = last.reduce(&[reg.control])?;
    Ok(ProtocolReport {
        delay: cfg.delay,
        final_system_fidelity: fidelity(&system, &up)?,
        final_control_entropy: von_neumann_entropy(&control)?,
        final_control_populations: [control.matrix()[(0, 0)].re, control.matrix()[(1, 1)].re],
        final_system_polarization: last.magnetization_of(&reg.system)?,
        final_total_magnetization: last.total_magnetization(),
        steps,
    })
}

/// One report per delay, in input order.
pub fn run_protocol_scan(cfg: &ProtocolConfig, delays: &[f64]) -> Result<Vec<ProtocolReport>> {
    delays
        .par_iter()
        .map(|&t| run_protocol(&cfg.clone().with_delay(t)))
        .collect()
}

/// Decay of the (N+1)-quantum coherence read out by undoing step C after the
/// delay: returns (delay, amplitude) normalized to the zero-delay run.
pub fn measure_7q_decay(cfg: &ProtocolConfig, delays: &[f64]) -> Result<Vec<(f64, f64)>> {
    let reg = cfg.register()?;
    if let Some(&bad) = delays.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::NegativeTime(bad));
    }
    let readout = |t: f64| -> Result<C64> {
        let run = cfg.clone().with_delay(t);
        let a = step_a_initialize(&run)?;
        let c = step_c_entangle(&step_b_create_cat(&a, &run)?, &run)?;
        let d = step_d_decohere(&c, &run)?;
        nq_amplitude(&apply_step_c(&d, &reg), &reg.system)
    };
    let baseline = readout(0.0)?;
    if baseline.norm() < 1e-300 {
        return Err(Error::InvalidParameter("cat weights produce no coherence to track".into()));
    }
    delays
        .par_iter()
        .map(|&t| Ok((t, (readout(t)? / baseline).re)))
        .collect()
}

/// Population decay after A → B → C → D, read as the system polarization
/// resolved by the control state, Σ ⟨(P↑ − P↓)_control ⊗ Sz_k⟩. This is the
/// system polarization a subsequent step E would deliver.
pub fn measure_diagonal_decay(cfg: &ProtocolConfig, delays: &[f64]) -> Result<Vec<(f64, f64)>> {
    let reg = cfg.register()?;
    if !cfg.include_flip_relaxation {
        return Err(Error::InvalidParameter("diagonal decay requires flip relaxation to be enabled".into()));
    }
    if let Some(&bad) = delays.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::NegativeTime(bad));
    }
    delays
        .par_iter()
        .map(|&t| {
            let run = cfg.clone().with_delay(t);
            let a = step_a_initialize(&run)?;
            let c = step_c_entangle(&step_b_create_cat(&a, &run)?, &run)?;
            let d = step_d_decohere(&c, &run)?;
            Ok((t, reg.resolved_polarization(&d)))
        })
        .collect()
}

/// Uniform dephasing rate giving an (n_spins)-quantum coherence lifetime `tau`.
pub fn dephasing_rate_for_lifetime(n_spins: usize, tau: f64) -> f64 {
    2.0 / (n_spins as f64 * tau)
}

/// Uniform flip rate giving the control-resolved polarization lifetime `tau`.
pub fn flip_rate_for_lifetime(tau: f64) -> f64 {
    1.0 / (4.0 * tau)
}

/// Uniform noise calibrated to a coherence lifetime and a population lifetime.
///
/// Flip relaxation also damps the N-quantum coherence, at N·κ. When
/// `flips_enabled` is set the dephasing rate covers only the remainder, so the
/// combined coherence lifetime still equals `coherence_lifetime`.
pub fn calibrated_noise(
    n_spins: usize,
    coherence_lifetime: f64,
    population_lifetime: f64,
    flips_enabled: bool,
) -> Result<NoiseModel> {
    if !(coherence_lifetime > 0.0 && population_lifetime > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lifetimes must be positive, got {coherence_lifetime} and {population_lifetime}"
        )));
    }
    let kappa = flip_rate_for_lifetime(population_lifetime);
    let gamma = if flips_enabled {
        2.0 * (1.0 / coherence_lifetime - n_spins as f64 * kappa) / n_spins as f64
    } else {
        dephasing_rate_for_lifetime(n_spins, coherence_lifetime)
    };
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "flip relaxation alone already shortens the coherence below {coherence_lifetime} s"
        )));
    }
    NoiseModel::uniform(n_spins, gamma, kappa)
}
