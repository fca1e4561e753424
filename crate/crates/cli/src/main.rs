//! Batch front end for the statmech workbench: every physics module is a
//! subcommand emitting plot-ready CSV or JSON with a reproducibility header.

mod commands;
mod models;
mod output;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "statmech",
    version,
    about = "Numerical statistical-mechanics workbench",
    long_about = None
)]
pub struct Cli {
    /// RNG seed recorded in every output header
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// relative tolerance for quadrature/root finding
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rel: f64,
    /// absolute tolerance for quadrature/root finding
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_abs: f64,
    /// output path (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// output format
    #[arg(long, global = true, value_parser = ["csv", "json"], default_value = "csv")]
    pub format: String,
    /// TOML config file mirroring the flags; explicit flags override it
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical observables of a level spectrum over a temperature sweep
    Ensemble {
        /// CSV file with header `energy,degeneracy`
        #[arg(long)]
        spectrum: std::path::PathBuf,
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Ideal quantum gas state equations at fixed density over a T sweep
    Gas {
        #[arg(long, value_parser = ["bose", "fermi", "boltzmann"])]
        kind: String,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// density-of-states prefactor
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// target particle density N/V
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Chemical equilibrium of a reaction file
    Chem {
        /// JSON reaction: species (name, z1), stoichiometry, counts
        #[arg(long)]
        reaction: std::path::PathBuf,
    },
    /// Ising solvers
    Ising {
        #[arg(long, value_parser = ["1d", "mean-field", "onsager", "lee-yang"])]
        mode: String,
        /// site count (1d / lee-yang)
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        beta_eps: f64,
        #[arg(long, default_value_t = 0.0)]
        beta_h: f64,
        #[arg(long, default_value_t = false)]
        open_chain: bool,
        /// coordination number (mean-field)
        #[arg(long, default_value_t = 4)]
        coordination: u32,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        h: f64,
        #[arg(long, default_value_t = 3.0)]
        temperature: f64,
        /// TOML sweep spec with [t] / [h] range tables (mean-field mode)
        #[arg(long)]
        sweep: Option<std::path::PathBuf>,
        /// coupling for onsager mode
        #[arg(long, default_value_t = 0.4)]
        eps_tilde: f64,
        #[arg(long, value_parser = ["chain", "ring", "complete"], default_value = "ring")]
        geometry: String,
    },
    /// RG flow of the dimensionless couplings and its fixed points
    Rg {
        #[arg(long, default_value_t = 3.0)]
        d: f64,
        #[arg(long, default_value_t = -0.1)]
        r0: f64,
        #[arg(long, default_value_t = 0.05)]
        u0: f64,
        #[arg(long, default_value_t = 5.0)]
        tau_end: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Second virial coefficient of a pair-potential preset over a T sweep
    Virial {
        #[arg(long, value_parser = ["hard-sphere", "square-well", "lennard-jones"])]
        potential: String,
        /// sphere radius (hard-sphere / square-well)
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// well or LJ depth
        #[arg(long, default_value_t = 1.0)]
        depth: f64,
        /// square-well outer range in units of the core
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        /// LJ length scale
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.5)]
        t_min: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Langevin trajectory ensemble statistics
    Langevin {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 2.0)]
        nu: f64,
        #[arg(long, default_value_t = 5e-3)]
        dt: f64,
        #[arg(long, default_value_t = 200)]
        n_traj: usize,
        #[arg(long, default_value_t = 5000)]
        n_steps: usize,
    },
    /// Rate-equation evolution and steady state
    Rates {
        /// CSV of off-diagonal rates `to,from,rate`
        #[arg(long)]
        matrix: std::path::PathBuf,
        /// matrix dimension
        #[arg(long)]
        n: usize,
        /// comma-separated initial probabilities (uniform when omitted)
        #[arg(long)]
        p0: Option<String>,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// emit only the steady state
        #[arg(long, default_value_t = false)]
        steady: bool,
    },
    /// Quantum master-equation propagation of a JSON model
    Master {
        #[arg(long)]
        model: std::path::PathBuf,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Spectral functions / FDT of a JSON model system
    Response {
        #[arg(long)]
        model: std::path::PathBuf,
        #[arg(long, default_value_t = 801)]
        n_grid: usize,
    },
    /// S-matrix transport: Landauer conductance or pumped charge
    Transport {
        /// JSON S-matrix with lead partition
        #[arg(long)]
        smatrix: Option<std::path::PathBuf>,
        #[arg(long, default_value = "A")]
        from: String,
        #[arg(long, default_value = "B")]
        to: String,
        /// JSON pumping-cycle model (BPT)
        #[arg(long)]
        cycle: Option<std::path::PathBuf>,
    },
    /// Work distribution, Jarzynski/Crooks, or the heat-conduction theorem
    Noneq {
        /// JSON protocol (endpoint Hamiltonians + schedule)
        #[arg(long, conflicts_with = "heat_ft")]
        protocol: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
        /// JSON two-bath conductor model: Gillespie heat-flow histogram and
        /// fluctuation-theorem residuals
        #[arg(long)]
        heat_ft: Option<std::path::PathBuf>,
    },
}

pub enum CliError {
    Config(String),
    Compute(String),
}

impl From<statmech::Error> for CliError {
    fn from(e: statmech::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

const SUBCOMMANDS: [&str; 12] = [
    "ensemble", "gas", "chem", "ising", "rg", "virial", "langevin", "rates", "master",
    "response", "transport", "noneq",
];

/// Splice config-file entries into argv ahead of the explicit flags, so the
/// command line wins on conflicts.
fn splice_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .ok_or_else(|| CliError::Config("--config needs a path".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
    let doc: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("bad TOML in {path}: {e}")))?;
    let sub_pos = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .ok_or_else(|| CliError::Config("missing subcommand".into()))?;
    // flags already given explicitly win: skip their config entries
    let explicit: std::collections::BTreeSet<&str> = argv
        .iter()
        .filter(|a| a.starts_with("--"))
        .map(|a| a.as_str())
        .collect();
    let mut global_flags = Vec::new();
    let mut sub_flags = Vec::new();
    let to_token = |v: &toml::Value| -> String {
        match v {
            toml::Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    };
    for (k, v) in &doc {
        match v {
            toml::Value::Table(t) => {
                if k != argv[sub_pos].as_str() {
                    continue;
                }
                for (k2, v2) in t {
                    let flag = format!("--{}", k2.replace('_', "-"));
                    if explicit.contains(flag.as_str()) {
                        continue;
                    }
                    sub_flags.push(flag);
                    sub_flags.push(to_token(v2));
                }
            }
            scalar => {
                let flag = format!("--{}", k.replace('_', "-"));
                if explicit.contains(flag.as_str()) {
                    continue;
                }
                global_flags.push(flag);
                global_flags.push(to_token(scalar));
            }
        }
    }
    let mut out = vec![argv[0].clone()];
    out.extend(global_flags);
    out.extend_from_slice(&argv[1..=sub_pos]);
    out.extend(sub_flags);
    out.extend_from_slice(&argv[sub_pos + 1..]);
    Ok(out)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match splice_config(argv) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints --help/--version itself with a success status
            if e.use_stderr() {
                eprintln!(
                    "{}",
                    serde_json::json!({"kind": "config", "error": e.to_string()})
                );
                return ExitCode::from(2);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let hash = output::config_hash(&argv[1..].to_vec());
    match commands::run(&cli, hash) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    match e {
        CliError::Config(msg) => {
            eprintln!("{}", serde_json::json!({"kind": "config", "error": msg}));
            ExitCode::from(2)
        }
        CliError::Compute(msg) => {
            eprintln!("{}", serde_json::json!({"kind": "compute", "error": msg}));
            ExitCode::from(3)
        }
    }
}
