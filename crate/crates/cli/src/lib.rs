//! Command-line front end for the low Mach number QHD toolkit.

pub mod commands;
pub mod config;
pub mod plot;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Failure;
use config::{parse_eps_list, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lowmach",
    version,
    about = "Low Mach number limit of quantum hydrodynamics on the torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated, strictly decreasing Mach numbers.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// Named initial data.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the wave function and record mass, Hamiltonian and energy.
    RunQhd,
    /// Integrate incompressible Euler.
    RunEuler,
    /// Integrate the oscillation profile with its Euler velocity.
    RunLimit,
    /// Record filtered acoustic quantities along a QHD run.
    Filter,
    /// Relative entropy trace of one coupled run.
    Entropy,
    /// Mach number sweep with a convergence report.
    Sweep,
    /// Run the property suite.
    Check,
    /// Render a trace or sweep CSV as SVG.
    Plot { input: PathBuf },
}

impl Cli {
    /// Defaults, then the config file, then command-line overrides.
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(eps) = &self.eps {
            cfg.eps_list = parse_eps_list(eps)?;
        }
        if let Some(p) = &self.preset {
            cfg.set("preset", p)?;
        }
        if let Some(seed) = self.seed {
            cfg.set_seed(seed);
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn execute(&self) -> Result<(), Failure> {
        let cfg = self.resolve()?;
        match &self.command {
            Command::RunQhd => commands::run_qhd(&cfg),
            Command::RunEuler => commands::run_euler(&cfg),
            Command::RunLimit => commands::run_limit(&cfg),
            Command::Filter => commands::run_filter(&cfg),
            Command::Entropy => commands::run_entropy(&cfg),
            Command::Sweep => commands::run_sweep(&cfg),
            Command::Check => commands::run_check(&cfg),
            Command::Plot { input } => commands::run_plot(&cfg, input),
        }
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Failure::Usage(String::new()).exit_code()
            } else {
                0
            };
        }
    };
    match cli.execute() {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("lowmach: {f}");
            f.exit_code()
        }
    }
}
