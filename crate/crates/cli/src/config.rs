//! File-backed run configuration. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use spincat::analysis::ScalingMode;
use spincat::dynamics::{CouplingKind, NoiseModel, SpinSystem};
use spincat::protocol::{calibrated_noise, NoiseMode, ProtocolConfig};
use spincat::{CatWeights, SpinRole, C64};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemBlock,
    pub noise: NoiseBlock,
    #[serde(default)]
    pub protocol: ProtocolBlock,
    #[serde(default)]
    pub scan: ScanBlock,
    #[serde(default)]
    pub spectrum: SpectrumBlock,
    #[serde(default)]
    pub scaling: ScalingBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub roles: Vec<SpinRole>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub offsets_hz: Option<Vec<f64>>,
    #[serde(default)]
    pub couplings: Vec<CouplingEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub i: usize,
    pub j: usize,
    pub hz: f64,
    pub kind: CouplingKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    #[serde(default)]
    pub mode: NoiseMode,
    #[serde(default)]
    pub dephasing_rates: Option<Vec<f64>>,
    #[serde(default)]
    pub flip_rates: Option<Vec<f64>>,
    /// Alternative to explicit rates: uniform rates fitted to two lifetimes.
    #[serde(default)]
    pub calibrate: Option<Calibration>,
    #[serde(default = "default_trajectories")]
    pub mc_trajectories: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub coherence_lifetime: f64,
    pub population_lifetime: f64,
}

fn default_trajectories() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolBlock {
    #[serde(default = "default_weights")]
    pub weights: Weights,
    #[serde(default = "one")]
    pub purity_fraction: f64,
    #[serde(default = "default_delays")]
    pub delays: Vec<f64>,
    #[serde(default)]
    pub include_flip_relaxation: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ProtocolBlock {
    fn default() -> Self {
        Self {
            weights: default_weights(),
            purity_fraction: 1.0,
            delays: default_delays(),
            include_flip_relaxation: false,
            seed: 0,
        }
    }
}

/// Complex amplitudes written as `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

fn default_weights() -> Weights {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Weights { a: [h, 0.0], b: [h, 0.0] }
}

fn one() -> f64 {
    1.0
}

fn default_delays() -> Vec<f64> {
    vec![0.0, 0.1, 0.2]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    #[serde(default = "default_nq_delays")]
    pub nq_delays: Vec<f64>,
    #[serde(default = "default_diagonal_delays")]
    pub diagonal_delays: Vec<f64>,
}

impl Default for ScanBlock {
    fn default() -> Self {
        Self { nq_delays: default_nq_delays(), diagonal_delays: default_diagonal_delays() }
    }
}

fn default_nq_delays() -> Vec<f64> {
    (0..12).map(|k| 0.01 * k as f64).collect()
}

fn default_diagonal_delays() -> Vec<f64> {
    (0..12).map(|k| 0.1 * k as f64).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    #[serde(default = "default_linewidth")]
    pub linewidth_hz: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Grid limits in Hz; chosen from the sticks when absent.
    #[serde(default)]
    pub range_hz: Option<[f64; 2]>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Observed spins; all system spins when absent.
    #[serde(default)]
    pub observe: Option<Vec<usize>>,
    /// Relative polarizations for the thermal state, one per spin.
    #[serde(default)]
    pub thermal_weights: Option<Vec<f64>>,
    #[serde(default = "default_epsilon")]
    pub thermal_epsilon: f64,
}

impl Default for SpectrumBlock {
    fn default() -> Self {
        Self {
            linewidth_hz: default_linewidth(),
            points: default_points(),
            range_hz: None,
            threshold: default_threshold(),
            observe: None,
            thermal_weights: None,
            thermal_epsilon: default_epsilon(),
        }
    }
}

fn default_linewidth() -> f64 {
    spincat::presets::DEFAULT_LINEWIDTH_HZ
}

fn default_points() -> usize {
    4096
}

fn default_threshold() -> f64 {
    0.01
}

fn default_epsilon() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingBlock {
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Per-spin dephasing rate; the mean configured rate when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_scaling_delays")]
    pub delays: Vec<f64>,
}

impl Default for ScalingBlock {
    fn default() -> Self {
        Self { n_min: default_n_min(), n_max: default_n_max(), gamma: None, delays: default_scaling_delays() }
    }
}

fn default_n_min() -> usize {
    2
}

fn default_n_max() -> usize {
    7
}

fn default_scaling_delays() -> Vec<f64> {
    (0..8).map(|k| 0.005 * k as f64).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// A parsed configuration together with the digest of its source text.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(text.as_bytes());
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded { config, sha256 })
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    let config: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    config.check()?;
    Ok(config)
}

fn key_err(key: &str, msg: impl std::fmt::Display) -> String {
    format!("{key}: {msg}")
}

impl RunConfig {
    /// Cross-field checks that the type layer cannot express.
    fn check(&self) -> Result<(), String> {
        self.spin_system()?;
        self.noise_model()?;
        self.weights()?;
        let p = &self.protocol;
        if !(p.purity_fraction > 0.0 && p.purity_fraction <= 1.0) {
            return Err(key_err("protocol.purity_fraction", format!("must lie in (0, 1], got {}", p.purity_fraction)));
        }
        check_delays("protocol.delays", &p.delays)?;
        check_delays("scan.nq_delays", &self.scan.nq_delays)?;
        check_delays("scan.diagonal_delays", &self.scan.diagonal_delays)?;
        check_delays("scaling.delays", &self.scaling.delays)?;
        let s = &self.spectrum;
        if !(s.linewidth_hz > 0.0) {
            return Err(key_err("spectrum.linewidth_hz", "must be positive"));
        }
        if s.points < 2 {
            return Err(key_err("spectrum.points", "must be at least 2"));
        }
        if !(s.threshold > 0.0 && s.threshold < 1.0) {
            return Err(key_err("spectrum.threshold", "must lie in (0, 1)"));
        }
        if self.output.formats.is_empty() {
            return Err(key_err("output.formats", "must name at least one format"));
        }
        Ok(())
    }

    pub fn n_spins(&self) -> usize {
        self.system.roles.len()
    }

    pub fn spin_system(&self) -> Result<SpinSystem, String> {
        let b = &self.system;
        let n = b.roles.len();
        let offsets = b.offsets_hz.clone().unwrap_or_else(|| vec![0.0; n]);
        let mut sys = SpinSystem::new(b.roles.clone(), offsets).map_err(|e| key_err("system.offsets_hz", e))?;
        if let Some(labels) = &b.labels {
            sys = sys.with_labels(labels.clone()).map_err(|e| key_err("system.labels", e))?;
        }
        for (k, c) in b.couplings.iter().enumerate() {
            if sys.coupling(c.i, c.j).is_some() {
                return Err(key_err(&format!("system.couplings[{k}]"), format!("pair ({}, {}) listed twice", c.i, c.j)));
            }
            sys.set_coupling(c.i, c.j, c.hz, c.kind).map_err(|e| key_err(&format!("system.couplings[{k}]"), e))?;
        }
        let controls = sys.control_sites().len();
        if controls != 1 {
            return Err(key_err("system.roles", format!("exactly one control spin is required, found {controls}")));
        }
        Ok(sys)
    }

    pub fn noise_model(&self) -> Result<NoiseModel, String> {
        let b = &self.noise;
        let n = self.n_spins();
        let noise = match (&b.calibrate, &b.dephasing_rates, &b.flip_rates) {
            (Some(c), None, None) => calibrated_noise(
                n,
                c.coherence_lifetime,
                c.population_lifetime,
                self.protocol.include_flip_relaxation,
            )
            .map_err(|e| key_err("noise.calibrate", e))?,
            (Some(_), _, _) => {
                return Err(key_err("noise.calibrate", "cannot be combined with dephasing_rates or flip_rates"))
            }
            (None, d, f) => {
                let d = d.clone().unwrap_or_else(|| vec![0.0; n]);
                let f = f.clone().unwrap_or_else(|| vec![0.0; n]);
                if d.len() != n {
                    return Err(key_err("noise.dephasing_rates", format!("expected {n} entries, got {}", d.len())));
                }
                if f.len() != n {
                    return Err(key_err("noise.flip_rates", format!("expected {n} entries, got {}", f.len())));
                }
                NoiseModel::new(d, f).map_err(|e| key_err("noise", e))?
            }
        };
        if b.mc_trajectories == 0 {
            return Err(key_err("noise.mc_trajectories", "must be at least 1"));
        }
        noise.with_monte_carlo(vec![0.0; n], b.mc_trajectories).map_err(|e| key_err("noise", e))
    }

    pub fn weights(&self) -> Result<CatWeights, String> {
        let w = &self.protocol.weights;
        CatWeights::new(C64::new(w.a[0], w.a[1]), C64::new(w.b[0], w.b[1])).map_err(|e| key_err("protocol.weights", e))
    }

    /// Protocol settings at zero delay with `seed` in place of the configured one.
    pub fn protocol_config(&self, seed: u64) -> Result<ProtocolConfig, String> {
        let cfg = ProtocolConfig::new(self.spin_system()?, self.noise_model()?, self.weights()?)
            .map_err(|e| key_err("system", e))?
            .with_purity_fraction(self.protocol.purity_fraction)
            .with_flip_relaxation(self.protocol.include_flip_relaxation)
            .with_noise_mode(self.noise.mode)
            .with_seed(seed);
        cfg.validate().map_err(|e| key_err("protocol", e))?;
        Ok(cfg)
    }

    pub fn scaling_mode(&self, seed: u64) -> Result<ScalingMode, String> {
        let gamma = match self.scaling.gamma {
            Some(g) => g,
            None => {
                let rates = self.noise_model()?.dephasing_rates().to_vec();
                rates.iter().sum::<f64>() / rates.len() as f64
            }
        };
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(key_err("scaling.gamma", "must be finite and non-negative"));
        }
        Ok(match self.noise.mode {
            NoiseMode::Analytic => ScalingMode::Analytic { gamma },
            NoiseMode::MonteCarlo => ScalingMode::MonteCarlo { gamma, trajectories: self.noise.mc_trajectories, seed },
        })
    }
}

fn check_delays(key: &str, delays: &[f64]) -> Result<(), String> {
    if let Some(bad) = delays.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(key_err(key, format!("delays must be finite and non-negative, got {bad}")));
    }
    Ok(())
}
