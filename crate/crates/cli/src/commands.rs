use std::path::Path;

use serde::Deserialize;
use serde_json::json;

use spincat::analysis::{fit_exponential, linear_regression, scaling_study, slope_standard_error};
use spincat::protocol::{measure_7q_decay, measure_diagonal_decay, run_protocol_scan, run_states};
use spincat::spectra::{linear_response_sticks, peak_list, thermal_state, FrequencyGrid, Spectrum};
use spincat::states::{ferro_state, pseudopure, Ferro};
use spincat::{ComplexMatrix, DensityMatrix, SpinRole, C64};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv, f, json, OutFile, Provenance};

/// Largest register the scaling study will build.
pub const SCALING_N_LIMIT: usize = 10;

/// Files produced by a command plus a short human-readable summary.
pub struct Outcome {
    pub files: Vec<OutFile>,
    pub summary: Vec<String>,
}

fn core(e: spincat::Error) -> CliError {
    CliError::from_core(e)
}

pub fn run_protocol(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome, CliError> {
    let base = cfg.protocol_config(prov.seed).map_err(CliError::Config)?;
    let delays = &cfg.protocol.delays;
    for &t in delays {
        for (step, rho) in run_states(&base.clone().with_delay(t)).map_err(core)? {
            rho.validate()
                .map_err(|e| CliError::Invariant(format!("delay {t} s, step {step:?}: {e}")))?;
        }
    }
    let reports = run_protocol_scan(&base, delays).map_err(core)?;

    let summary_rows = reports.iter().map(|r| {
        vec![
            f(r.delay),
            f(r.final_system_fidelity),
            f(r.final_control_entropy),
            f(r.final_control_populations[0]),
            f(r.final_control_populations[1]),
            f(r.final_system_polarization),
            f(r.final_total_magnetization),
        ]
    });
    let step_rows = reports.iter().flat_map(|r| {
        r.steps.iter().map(move |s| {
            vec![
                f(r.delay),
                format!("{:?}", s.step),
                f(s.fidelity),
                f(s.entropy_total),
                f(s.entropy_control),
                f(s.entropy_system),
                f(s.total_magnetization),
            ]
        })
    });
    let order_rows = reports.iter().flat_map(|r| {
        r.steps.iter().flat_map(move |s| {
            s.coherence_weights
                .iter()
                .map(move |w| vec![f(r.delay), format!("{:?}", s.step), w.order.to_string(), f(w.weight)])
        })
    });
    let files = vec![
        csv(
            prov,
            "protocol_summary.csv",
            &[
                "delay_s",
                "final_system_fidelity",
                "final_control_entropy",
                "control_population_up",
                "control_population_down",
                "final_system_polarization",
                "final_total_magnetization",
            ],
            summary_rows,
        ),
        csv(
            prov,
            "protocol_steps.csv",
            &["delay_s", "step", "fidelity", "entropy_total", "entropy_control", "entropy_system", "total_magnetization"],
            step_rows,
        ),
        csv(prov, "coherence_orders.csv", &["delay_s", "step", "order", "weight"], order_rows),
        json(prov, "protocol_report.json", "spincat.run-protocol/1", json!({ "reports": reports })),
    ];
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "delay {:.4} s: system fidelity {:.6}, control entropy {:.6}",
                r.delay, r.final_system_fidelity, r.final_control_entropy
            )
        })
        .collect();
    Ok(Outcome { files, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Nq,
    Diagonal,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::Nq => "nq",
            Which::Diagonal => "diagonal",
        }
    }
}

pub fn decay_scan(cfg: &RunConfig, prov: &Provenance, which: Which) -> Result<Outcome, CliError> {
    let base = cfg.protocol_config(prov.seed).map_err(CliError::Config)?;
    let points = match which {
        Which::Nq => measure_7q_decay(&base, &cfg.scan.nq_delays).map_err(core)?,
        Which::Diagonal => {
            if !base.noise.has_flips() {
                return Err(CliError::Config("noise.flip_rates: the diagonal scan needs non-zero flip rates".into()));
            }
            let run = base.with_flip_relaxation(true);
            let p0 = measure_diagonal_decay(&run, &[0.0]).map_err(core)?[0].1;
            if p0 == 0.0 {
                return Err(CliError::Analysis("zero-delay polarization vanishes; nothing to normalize".into()));
            }
            measure_diagonal_decay(&run, &cfg.scan.diagonal_delays)
                .map_err(core)?
                .into_iter()
                .map(|(t, p)| (t, p / p0))
                .collect()
        }
    };
    let fit = fit_exponential(&points).map_err(|e| match e {
        spincat::Error::Fit(msg) => CliError::Analysis(format!("{} decay: {msg}", which.name())),
        other => core(other),
    })?;
    let name = which.name();
    let files = vec![
        csv(
            prov,
            &format!("decay_{name}.csv"),
            &["delay_s", "normalized_amplitude"],
            points.iter().map(|&(t, y)| vec![f(t), f(y)]),
        ),
        json(
            prov,
            &format!("fit_{name}.json"),
            "spincat.decay-scan/1",
            json!({ "observable": name, "fit": fit, "points": points }),
        ),
    ];
    let summary = vec![format!("{name} decay: tau {:.6} s, R^2 {:.8}", fit.tau, fit.r_squared)];
    Ok(Outcome { files, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StateChoice {
    /// Pseudopure all-up state (control up).
    PseudopureAlive,
    /// Pseudopure all-down state.
    PseudopureDead,
    /// High-temperature equilibrium.
    Thermal,
}

/// Density matrix given as row-major nested arrays of real and imaginary parts.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
}

fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let file: StateFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let dim = file.real.len();
    if file.imag.len() != dim || file.real.iter().chain(&file.imag).any(|row| row.len() != dim) {
        return Err(bad("real and imag must both be square with the same size".into()));
    }
    let entries: Vec<C64> = (0..dim * dim).map(|k| C64::new(file.real[k / dim][k % dim], file.imag[k / dim][k % dim])).collect();
    let m = ComplexMatrix::from_row_major(dim, &entries).map_err(|e| bad(e.to_string()))?;
    let rho = DensityMatrix::new(m).map_err(|e| bad(e.to_string()))?;
    rho.validate().map_err(|e| bad(e.to_string()))?;
    Ok(rho)
}

pub fn spectrum(
    cfg: &RunConfig,
    prov: &Provenance,
    state: StateChoice,
    state_file: Option<&Path>,
    decouple: bool,
) -> Result<Outcome, CliError> {
    let sys = cfg.spin_system().map_err(CliError::Config)?;
    let n = sys.n_spins();
    let block = &cfg.spectrum;
    let (rho, label) = match state_file {
        Some(path) => (load_state(path)?, format!("file:{}", path.display())),
        None => {
            let rho = match state {
                StateChoice::PseudopureAlive | StateChoice::PseudopureDead => {
                    let which = if state == StateChoice::PseudopureAlive { Ferro::Alive } else { Ferro::Dead };
                    let target = ferro_state(n, which).map_err(core)?;
                    if cfg.protocol.purity_fraction == 1.0 {
                        target
                    } else {
                        pseudopure(n, &target, cfg.protocol.purity_fraction).map_err(core)?
                    }
                }
                StateChoice::Thermal => {
                    let weights = match &block.thermal_weights {
                        Some(w) if w.len() != n => {
                            return Err(CliError::Config(format!(
                                "spectrum.thermal_weights: expected {n} entries, got {}",
                                w.len()
                            )))
                        }
                        Some(w) => w.clone(),
                        None => sys
                            .roles()
                            .iter()
                            .map(|r| if *r == SpinRole::Control { 0.25 } else { 1.0 })
                            .collect(),
                    };
                    thermal_state(&weights, block.thermal_epsilon)
                        .map_err(|e| CliError::Config(format!("spectrum: {e}")))?
                }
            };
            let label = match state {
                StateChoice::PseudopureAlive => "pseudopure_alive",
                StateChoice::PseudopureDead => "pseudopure_dead",
                StateChoice::Thermal => "thermal",
            };
            (rho, label.to_string())
        }
    };
    if rho.n_spins() != n {
        return Err(CliError::Config(format!("state has {} spins, system has {n}", rho.n_spins())));
    }
    let observe = block.observe.clone().unwrap_or_else(|| sys.system_sites());
    let decoupled = if decouple { sys.control_sites() } else { Vec::new() };
    let sticks = linear_response_sticks(&rho, &sys, &observe, &decoupled)
        .map_err(|e| CliError::Config(format!("spectrum.observe: {e}")))?;
    let grid = match block.range_hz {
        Some([lo, hi]) => FrequencyGrid::new(lo, hi, block.points),
        None => FrequencyGrid::covering(&sticks, block.linewidth_hz, block.points),
    }
    .map_err(|e| CliError::Config(format!("spectrum.range_hz: {e}")))?;
    let spec = Spectrum::from_sticks(sticks, block.linewidth_hz, grid).map_err(core)?;
    let peaks = peak_list(&spec, block.threshold).map_err(|e| CliError::Config(format!("spectrum.threshold: {e}")))?;

    let files = vec![
        csv(
            prov,
            "spectrum_trace.csv",
            &["frequency_hz", "amplitude"],
            spec.trace.iter().enumerate().map(|(k, y)| vec![f(spec.grid.frequency(k)), f(*y)]),
        ),
        csv(
            prov,
            "spectrum_sticks.csv",
            &["frequency_hz", "amplitude_re", "amplitude_im"],
            spec.sticks.iter().map(|s| vec![f(s.frequency_hz), f(s.amplitude.re), f(s.amplitude.im)]),
        ),
        json(
            prov,
            "spectrum.json",
            "spincat.spectrum/1",
            json!({
                "state": label,
                "observe": observe,
                "decoupled": decoupled,
                "linewidth_hz": spec.linewidth_hz,
                "threshold": block.threshold,
                "sticks": spec.sticks,
                "peaks": peaks,
            }),
        ),
    ];
    let positions: Vec<String> = peaks.iter().map(|p| format!("{:.3}", p.frequency_hz)).collect();
    let summary = vec![
        format!("peaks: {}", peaks.len()),
        format!("peak positions (Hz): {}", positions.join(", ")),
    ];
    Ok(Outcome { files, summary })
}

pub fn scaling(cfg: &RunConfig, prov: &Provenance, n_min: usize, n_max: usize) -> Result<Outcome, CliError> {
    if n_max > SCALING_N_LIMIT {
        return Err(CliError::Config(format!("scaling.n_max: at most {SCALING_N_LIMIT} spins are supported, got {n_max}")));
    }
    if n_min < 1 || n_min >= n_max {
        return Err(CliError::Config(format!("scaling: need 1 <= n_min < n_max, got {n_min}..{n_max}")));
    }
    let mode = cfg.scaling_mode(prov.seed).map_err(CliError::Config)?;
    let ns: Vec<usize> = (n_min..=n_max).collect();
    let pts = scaling_study(&ns, mode, &cfg.scaling.delays).map_err(|e| match e {
        spincat::Error::Fit(msg) => CliError::Analysis(format!("scaling fit: {msg}")),
        other => core(other),
    })?;
    let xs: Vec<f64> = pts.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.rate).collect();
    let line = linear_regression(&xs, &ys).map_err(|e| CliError::Analysis(e.to_string()))?;
    let errors: Option<Vec<f64>> = pts.iter().map(|p| p.rate_std_error).collect();
    let slope_se = errors.map(|e| slope_standard_error(&xs, &e));

    let files = vec![
        csv(
            prov,
            "scaling.csv",
            &["n", "rate_per_s", "rate_std_error"],
            pts.iter().map(|p| vec![p.n.to_string(), f(p.rate), p.rate_std_error.map_or(String::new(), f)]),
        ),
        json(
            prov,
            "scaling.json",
            "spincat.scaling/1",
            json!({
                "mode": mode,
                "gamma": mode.gamma(),
                "expected_slope": mode.gamma() / 2.0,
                "slope": line.slope,
                "intercept": line.intercept,
                "pearson_r": line.r,
                "slope_std_error": slope_se,
                "points": pts,
            }),
        ),
    ];
    let mut summary = vec![format!(
        "slope {:.9} (gamma/2 = {:.9}), intercept {:.3e}, r {:.9}",
        line.slope,
        mode.gamma() / 2.0,
        line.intercept,
        line.r
    )];
    if let Some(se) = slope_se {
        summary.push(format!("slope standard error {se:.3e}"));
    }
    Ok(Outcome { files, summary })
}
