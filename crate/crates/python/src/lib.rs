//! Python bindings: spin systems, density matrices, noise channels, the
//! protocol runner, lifetime fits and spectra.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use spincat::analysis::{self, ScalingMode};
use spincat::dynamics::{self, CouplingKind, NoiseModel};
use spincat::protocol::{self, NoiseMode};
use spincat::spectra;
use spincat::states::{self, Ferro};
use spincat::{CatWeights, ComplexMatrix, SpinIndex, SpinRole, C64};

fn err(e: spincat::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn role(name: &str) -> PyResult<SpinRole> {
    match name {
        "control" => Ok(SpinRole::Control),
        "system" => Ok(SpinRole::System),
        other => Err(PyValueError::new_err(format!("unknown role {other:?}, expected 'control' or 'system'"))),
    }
}

fn kind(name: &str) -> PyResult<CouplingKind> {
    match name {
        "homonuclear_dipolar" => Ok(CouplingKind::HomonuclearDipolar),
        "heteronuclear_zz" => Ok(CouplingKind::HeteronuclearZz),
        other => Err(PyValueError::new_err(format!(
            "unknown coupling kind {other:?}, expected 'homonuclear_dipolar' or 'heteronuclear_zz'"
        ))),
    }
}

fn to_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    let d = m.dim();
    (0..d).map(|r| (0..d).map(|c| m[(r, c)]).collect()).collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    ComplexMatrix::from_row_major(d, &flat).map_err(err)
}

#[pyclass(name = "SpinSystem", module = "spincat_py", skip_from_py_object)]
#[derive(Clone)]
struct PySpinSystem {
    inner: dynamics::SpinSystem,
}

#[pymethods]
impl PySpinSystem {
    /// `roles` entries are "control" or "system"; offsets in Hz.
    #[new]
    #[pyo3(signature = (roles, offsets_hz=None))]
    fn new(roles: Vec<String>, offsets_hz: Option<Vec<f64>>) -> PyResult<Self> {
        let roles = roles.iter().map(|r| role(r)).collect::<PyResult<Vec<_>>>()?;
        let offsets = offsets_hz.unwrap_or_else(|| vec![0.0; roles.len()]);
        Ok(Self { inner: dynamics::SpinSystem::new(roles, offsets).map_err(err)? })
    }

    /// Seven-spin benzene-like cluster with the default couplings.
    #[staticmethod]
    fn benzene() -> Self {
        Self { inner: spincat::presets::benzene_system() }
    }

    fn set_coupling(&mut self, i: usize, j: usize, hz: f64, kind_name: &str) -> PyResult<()> {
        self.inner.set_coupling(i, j, hz, kind(kind_name)?).map_err(err)
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// Hamiltonian in rad/s as nested lists of complex numbers.
    fn hamiltonian(&self) -> Vec<Vec<C64>> {
        to_rows(&dynamics::build_hamiltonian(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("SpinSystem(n_spins={}, couplings={})", self.inner.n_spins(), self.inner.couplings().count())
    }
}

#[pyclass(name = "DensityMatrix", module = "spincat_py", skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// From nested lists of complex numbers; must be Hermitian with unit trace.
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        Ok(Self { inner: states::DensityMatrix::new(from_rows(rows)?).map_err(err)? })
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins()
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        to_rows(self.inner.matrix())
    }

    fn trace(&self) -> C64 {
        self.inner.trace()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn entropy(&self) -> PyResult<f64> {
        states::von_neumann_entropy(&self.inner).map_err(err)
    }

    /// Tr(ρσ) with a pure target σ.
    fn fidelity(&self, target: PyRef<'_, PyDensityMatrix>) -> PyResult<f64> {
        states::fidelity(&self.inner, &target.inner).map_err(err)
    }

    fn reduce(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.reduce(&keep).map_err(err)? })
    }

    /// ⟨u|ρ|d⟩ on the given spins after tracing out the rest.
    fn nq_amplitude(&self, sites: Vec<usize>) -> PyResult<C64> {
        states::nq_amplitude(&self.inner, &sites).map_err(err)
    }

    /// Frobenius weight of each coherence order.
    fn coherence_weights(&self) -> Vec<(i32, f64)> {
        states::coherence_weights(self.inner.matrix()).into_iter().collect()
    }

    fn total_magnetization(&self) -> f64 {
        self.inner.total_magnetization()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(n_spins={}, purity={:.6})", self.inner.n_spins(), self.inner.purity())
    }
}

fn wrap(inner: states::DensityMatrix) -> PyDensityMatrix {
    PyDensityMatrix { inner }
}

#[pyfunction]
#[pyo3(signature = (n, a=None, b=None))]
fn cat_state(n: usize, a: Option<C64>, b: Option<C64>) -> PyResult<PyDensityMatrix> {
    let w = match (a, b) {
        (None, None) => CatWeights::balanced(),
        (Some(a), Some(b)) => CatWeights::new(a, b).map_err(err)?,
        _ => return Err(PyValueError::new_err("give both weights or neither")),
    };
    Ok(wrap(states::cat_state(n, w).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (n, alive=true))]
fn ferro_state(n: usize, alive: bool) -> PyResult<PyDensityMatrix> {
    Ok(wrap(states::ferro_state(n, if alive { Ferro::Alive } else { Ferro::Dead }).map_err(err)?))
}

#[pyfunction]
fn pseudopure(rho: PyRef<'_, PyDensityMatrix>, purity_fraction: f64) -> PyResult<PyDensityMatrix> {
    Ok(wrap(states::pseudopure(rho.inner.n_spins(), &rho.inner, purity_fraction).map_err(err)?))
}

#[pyfunction]
fn apply_dephasing(rho: PyRef<'_, PyDensityMatrix>, rates: Vec<f64>, t: f64) -> PyResult<PyDensityMatrix> {
    let n = rates.len();
    let noise = NoiseModel::new(rates, vec![0.0; n]).map_err(err)?;
    Ok(wrap(dynamics::apply_dephasing(&rho.inner, &noise, t).map_err(err)?))
}

#[pyfunction]
fn apply_flip_relaxation(rho: PyRef<'_, PyDensityMatrix>, rates: Vec<f64>, t: f64) -> PyResult<PyDensityMatrix> {
    let n = rates.len();
    let noise = NoiseModel::new(vec![0.0; n], rates).map_err(err)?;
    Ok(wrap(dynamics::apply_flip_relaxation(&rho.inner, &noise, t).map_err(err)?))
}

#[pyfunction]
fn apply_phase_kicks_mc(
    rho: PyRef<'_, PyDensityMatrix>,
    sigma: Vec<f64>,
    trajectories: usize,
    seed: u64,
) -> PyResult<PyDensityMatrix> {
    let noise = NoiseModel::noiseless(sigma.len()).with_monte_carlo(sigma, trajectories).map_err(err)?;
    Ok(wrap(dynamics::apply_phase_kicks_mc(&rho.inner, &noise, seed).map_err(err)?))
}

#[pyfunction]
fn rotate_z(rho: PyRef<'_, PyDensityMatrix>, angles: Vec<f64>) -> PyResult<PyDensityMatrix> {
    Ok(wrap(dynamics::rotate_z(&rho.inner, &angles).map_err(err)?))
}

#[pyfunction]
fn controlled_not_all(rho: PyRef<'_, PyDensityMatrix>, control: usize, targets: Vec<usize>) -> PyResult<PyDensityMatrix> {
    Ok(wrap(dynamics::controlled_not_all(&rho.inner, SpinIndex::control(control), &targets).map_err(err)?))
}

#[pyfunction]
fn evolve(rho: PyRef<'_, PyDensityMatrix>, system: PyRef<'_, PySpinSystem>, t: f64) -> PyResult<PyDensityMatrix> {
    let h = dynamics::build_hamiltonian(&system.inner);
    Ok(wrap(dynamics::evolve(&rho.inner, &h, t).map_err(err)?))
}

#[pyclass(name = "ProtocolConfig", module = "spincat_py", skip_from_py_object)]
#[derive(Clone)]
struct PyProtocolConfig {
    inner: protocol::ProtocolConfig,
}

#[pymethods]
impl PyProtocolConfig {
    #[new]
    #[pyo3(signature = (system, dephasing_rates, flip_rates, a=None, b=None))]
    fn new(
        system: PyRef<'_, PySpinSystem>,
        dephasing_rates: Vec<f64>,
        flip_rates: Vec<f64>,
        a: Option<C64>,
        b: Option<C64>,
    ) -> PyResult<Self> {
        let w = match (a, b) {
            (Some(a), Some(b)) => CatWeights::new(a, b).map_err(err)?,
            _ => CatWeights::balanced(),
        };
        let noise = NoiseModel::new(dephasing_rates, flip_rates).map_err(err)?;
        Ok(Self { inner: protocol::ProtocolConfig::new(system.inner.clone(), noise, w).map_err(err)? })
    }

    /// Benzene-like cluster with noise calibrated to the two reference lifetimes.
    #[staticmethod]
    #[pyo3(signature = (include_flip_relaxation=false))]
    fn benzene(include_flip_relaxation: bool) -> PyResult<Self> {
        use spincat::presets::{benzene_system, NQ_LIFETIME, POPULATION_LIFETIME};
        let noise = protocol::calibrated_noise(7, NQ_LIFETIME, POPULATION_LIFETIME, include_flip_relaxation)
            .map_err(err)?;
        let cfg = protocol::ProtocolConfig::new(benzene_system(), noise, CatWeights::balanced())
            .map_err(err)?
            .with_flip_relaxation(include_flip_relaxation);
        Ok(Self { inner: cfg })
    }

    fn with_delay(&self, delay: f64) -> Self {
        Self { inner: self.inner.clone().with_delay(delay) }
    }

    fn with_purity_fraction(&self, f: f64) -> Self {
        Self { inner: self.inner.clone().with_purity_fraction(f) }
    }

    fn with_flip_relaxation(&self, on: bool) -> Self {
        Self { inner: self.inner.clone().with_flip_relaxation(on) }
    }

    /// Switches step D to Gaussian phase kicks averaged over `trajectories`.
    fn with_monte_carlo(&self, trajectories: usize, seed: u64) -> PyResult<Self> {
        let n = self.inner.noise.n_spins();
        let noise = self.inner.noise.clone().with_monte_carlo(vec![0.0; n], trajectories).map_err(err)?;
        Ok(Self { inner: self.inner.clone().with_noise(noise).with_noise_mode(NoiseMode::MonteCarlo).with_seed(seed) })
    }

    #[getter]
    fn delay(&self) -> f64 {
        self.inner.delay
    }

    #[getter]
    fn dephasing_rates(&self) -> Vec<f64> {
        self.inner.noise.dephasing_rates().to_vec()
    }

    #[getter]
    fn flip_rates(&self) -> Vec<f64> {
        self.inner.noise.flip_rates().to_vec()
    }
}

/// Runs the five protocol steps and returns the report as a JSON string.
#[pyfunction]
fn run_protocol(cfg: PyRef<'_, PyProtocolConfig>) -> PyResult<String> {
    let report = protocol::run_protocol(&cfg.inner).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// States after each step, in order A to E.
#[pyfunction]
fn run_states(cfg: PyRef<'_, PyProtocolConfig>) -> PyResult<Vec<(String, PyDensityMatrix)>> {
    Ok(protocol::run_states(&cfg.inner)
        .map_err(err)?
        .into_iter()
        .map(|(step, rho)| (format!("{step:?}"), wrap(rho)))
        .collect())
}

#[pyfunction]
fn measure_7q_decay(cfg: PyRef<'_, PyProtocolConfig>, delays: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    protocol::measure_7q_decay(&cfg.inner, &delays).map_err(err)
}

#[pyfunction]
fn measure_diagonal_decay(cfg: PyRef<'_, PyProtocolConfig>, delays: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    protocol::measure_diagonal_decay(&cfg.inner, &delays).map_err(err)
}

/// (tau, amplitude, residual_rms, r_squared) of A·exp(−t/τ).
#[pyfunction]
fn fit_exponential(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64, f64)> {
    let fit = analysis::fit_exponential(&points).map_err(err)?;
    Ok((fit.tau, fit.amplitude, fit.residual_rms, fit.r_squared))
}

/// (N, fitted rate) for each N under uniform analytic dephasing γ.
#[pyfunction]
fn scaling_study(n_range: Vec<usize>, gamma: f64, delays: Vec<f64>) -> PyResult<Vec<(usize, f64)>> {
    Ok(analysis::scaling_study(&n_range, ScalingMode::Analytic { gamma }, &delays)
        .map_err(err)?
        .into_iter()
        .map(|p| (p.n, p.rate))
        .collect())
}

/// (frequency in Hz, complex amplitude) sticks of the linear-response spectrum.
#[pyfunction]
#[pyo3(signature = (rho, system, observe, decouple=Vec::new()))]
fn linear_response_sticks(
    rho: PyRef<'_, PyDensityMatrix>,
    system: PyRef<'_, PySpinSystem>,
    observe: Vec<usize>,
    decouple: Vec<usize>,
) -> PyResult<Vec<(f64, C64)>> {
    Ok(spectra::linear_response_sticks(&rho.inner, &system.inner, &observe, &decouple)
        .map_err(err)?
        .into_iter()
        .map(|s| (s.frequency_hz, s.amplitude))
        .collect())
}

/// Resolved peaks (frequency, summed amplitude) for the given sticks.
#[pyfunction]
#[pyo3(signature = (sticks, linewidth_hz=2.0, threshold=0.01))]
fn peak_list(sticks: Vec<(f64, C64)>, linewidth_hz: f64, threshold: f64) -> PyResult<Vec<(f64, C64)>> {
    let sticks: Vec<spectra::Stick> =
        sticks.into_iter().map(|(frequency_hz, amplitude)| spectra::Stick { frequency_hz, amplitude }).collect();
    let grid = spectra::FrequencyGrid::covering(&sticks, linewidth_hz, 2).map_err(err)?;
    let spec = spectra::Spectrum::from_sticks(sticks, linewidth_hz, grid).map_err(err)?;
    Ok(spectra::peak_list(&spec, threshold)
        .map_err(err)?
        .into_iter()
        .map(|p| (p.frequency_hz, p.amplitude))
        .collect())
}

#[pymodule]
fn spincat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpinSystem>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyProtocolConfig>()?;
    m.add_function(wrap_pyfunction!(cat_state, m)?)?;
    m.add_function(wrap_pyfunction!(ferro_state, m)?)?;
    m.add_function(wrap_pyfunction!(pseudopure, m)?)?;
    m.add_function(wrap_pyfunction!(apply_dephasing, m)?)?;
    m.add_function(wrap_pyfunction!(apply_flip_relaxation, m)?)?;
    m.add_function(wrap_pyfunction!(apply_phase_kicks_mc, m)?)?;
    m.add_function(wrap_pyfunction!(rotate_z, m)?)?;
    m.add_function(wrap_pyfunction!(controlled_not_all, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(run_states, m)?)?;
    m.add_function(wrap_pyfunction!(measure_7q_decay, m)?)?;
    m.add_function(wrap_pyfunction!(measure_diagonal_decay, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponential, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_study, m)?)?;
    m.add_function(wrap_pyfunction!(linear_response_sticks, m)?)?;
    m.add_function(wrap_pyfunction!(peak_list, m)?)?;
    Ok(())
}
