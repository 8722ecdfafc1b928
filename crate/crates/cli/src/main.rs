//! `spincat`: run the cat-state protocol, lifetime scans, spectra and the
//! spin-count scaling study from a TOML configuration.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{StateChoice, Which};
use config::Format;
use error::CliError;
use output::{OutFile, Provenance};

#[derive(Debug, Parser)]
#[command(name = "spincat", version, about = "Cat-state decoherence and recovery in small spin clusters")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed; overrides protocol.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write only this format; overrides output.formats.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run preparation, entanglement, decoherence and recovery for every configured delay.
    RunProtocol,
    /// Scan the delay and fit a single-exponential lifetime.
    DecayScan {
        #[arg(value_enum)]
        which: Which,
    },
    /// Linear-response spectrum of a prepared state.
    Spectrum {
        #[arg(long, value_enum, default_value = "pseudopure-alive")]
        state: StateChoice,
        /// JSON density matrix with "real" and "imag" arrays; overrides --state.
        #[arg(long)]
        state_file: Option<PathBuf>,
        /// Remove couplings to the control spin during detection.
        #[arg(long)]
        decouple: bool,
    },
    /// Fitted cat-coherence decay rate against spin count.
    Scaling {
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::RunProtocol => "run-protocol",
            Command::DecayScan { .. } => "decay-scan",
            Command::Spectrum { .. } => "spectrum",
            Command::Scaling { .. } => "scaling",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    let loaded = config::load(&path)?;
    let cfg = &loaded.config;
    let prov = Provenance {
        command: cli.command.name().to_string(),
        config_sha256: loaded.sha256.clone(),
        seed: cli.seed.unwrap_or(cfg.protocol.seed),
    };
    let outcome = match &cli.command {
        Command::RunProtocol => commands::run_protocol(cfg, &prov)?,
        Command::DecayScan { which } => commands::decay_scan(cfg, &prov, *which)?,
        Command::Spectrum { state, state_file, decouple } => {
            commands::spectrum(cfg, &prov, *state, state_file.as_deref(), *decouple)?
        }
        Command::Scaling { n_min, n_max } => commands::scaling(
            cfg,
            &prov,
            n_min.unwrap_or(cfg.scaling.n_min),
            n_max.unwrap_or(cfg.scaling.n_max),
        )?,
    };
    let formats = match cli.format {
        Some(only) => vec![only],
        None => cfg.output.formats.clone(),
    };
    let files: Vec<OutFile> = outcome
        .files
        .into_iter()
        .filter(|file| {
            let format = if file.name.ends_with(".json") { Format::Json } else { Format::Csv };
            formats.contains(&format)
        })
        .collect();
    let dir = cli.out.unwrap_or_else(|| cfg.output.directory.clone());
    let written = output::write_all(&dir, &files)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
