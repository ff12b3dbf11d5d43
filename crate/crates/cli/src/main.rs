//! `genmod`: command-line front end for modularity-based community
//! detection and its spectral verifiers.
//!
//! Exit codes: 0 success, 1 error (JSON record on stderr), 2 the graph was
//! left as a single community, 3 a verifier failed, 64 usage error.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use genmod::io::Format;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "genmod", version, about = "Spectral community detection using rank-one corrected modularity matrices")]
struct Cli {
    /// TOML run configuration; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summarize the input graph.
    Info(Common),
    /// Split the graph by the sign of the leading eigenvector.
    Bipartition(Common),
    /// Recursive spectral bipartition.
    Ssgb(SsgbArgs),
    /// Run the spectral verifiers.
    Verify(VerifyArgs),
    /// Repeat SSGB over a list of resolution parameters.
    Sweep(RunArgs),
    /// Rate of change of the leading eigenvalue under an edge perturbation.
    Perturb(PerturbArgs),
    /// Print the effective run configuration as TOML.
    Config(RunArgs),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    /// edgelist | matrixmarket
    #[arg(long)]
    format: Option<Format>,
    /// ng | norm | rb | rn | afg
    #[arg(long)]
    model: Option<String>,
    /// Resolution parameter; `sweep` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    gamma: Vec<f64>,
    /// Sign tolerance, relative to the Frobenius norm.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SsgbFlags {
    #[arg(long)]
    size_floor: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Refuse splits that lower the modularity.
    #[arg(long)]
    greedy_q: bool,
}

#[derive(Debug, Args)]
struct SsgbArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ssgb: SsgbFlags,
    /// json | flat
    #[arg(long)]
    output_format: Option<OutputFormat>,
    /// Also write the flat partition here.
    #[arg(long)]
    flat: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ssgb: SsgbFlags,
    /// Comma-separated: gap, nodal, sign, perturb, counts, all.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    theorems: Vec<String>,
    /// Edge `i,j` (file ids) for the perturbation check.
    #[arg(long)]
    edge: Option<String>,
    /// Shifts for the nodal check; the first one is also the perturbation size.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Flat partition to use for the eigenvalue-count bounds instead of SSGB.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    ssgb: SsgbFlags,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    #[command(flatten)]
    common: Common,
    /// Edge `i,j` (file ids).
    #[arg(long)]
    edge: String,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "flat" => Ok(OutputFormat::Flat),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

fn apply_common(cfg: &mut RunConfig, c: &Common, single_gamma: bool) -> Result<(), CliError> {
    if let Some(p) = &c.input {
        cfg.input.path = Some(p.clone());
    }
    if let Some(f) = c.format {
        cfg.input.format = f;
    }
    if let Some(m) = &c.model {
        cfg.model.name = m.clone();
    }
    if single_gamma {
        match c.gamma.as_slice() {
            [] => {}
            [g] => cfg.model.gamma = Some(*g),
            _ => return Err(CliError::Usage("--gamma takes a single value here".into())),
        }
    }
    if let Some(t) = c.tol {
        cfg.tolerances.sign = t;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.output {
        cfg.output.path = Some(o.clone());
    }
    Ok(())
}

fn apply_ssgb(cfg: &mut RunConfig, s: &SsgbFlags) {
    if let Some(f) = s.size_floor {
        cfg.ssgb.size_floor = f;
    }
    if let Some(d) = s.max_depth {
        cfg.ssgb.max_depth = Some(d);
    }
    if s.greedy_q {
        cfg.ssgb.greedy_q = true;
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Info(c) => {
            apply_common(&mut cfg, &c, true)?;
            commands::info(&cfg)
        }
        Command::Bipartition(c) => {
            apply_common(&mut cfg, &c, true)?;
            commands::bipartition(&cfg)
        }
        Command::Ssgb(a) => {
            apply_common(&mut cfg, &a.common, true)?;
            apply_ssgb(&mut cfg, &a.ssgb);
            if let Some(f) = a.output_format {
                cfg.output.format = f;
            }
            commands::ssgb(&cfg, a.flat.as_deref())
        }
        Command::Verify(a) => {
            apply_common(&mut cfg, &a.common, true)?;
            apply_ssgb(&mut cfg, &a.ssgb);
            let request = commands::VerifyRequest {
                theorems: a.theorems,
                edge: a.edge,
                eps: a.eps,
                partition: a.partition,
            };
            commands::verify(&cfg, &request)
        }
        Command::Sweep(a) => {
            apply_common(&mut cfg, &a.common, false)?;
            apply_ssgb(&mut cfg, &a.ssgb);
            commands::sweep(&cfg, &a.common.gamma)
        }
        Command::Config(a) => {
            apply_common(&mut cfg, &a.common, true)?;
            apply_ssgb(&mut cfg, &a.ssgb);
            print!("{}", cfg.to_toml());
            Ok(0)
        }
        Command::Perturb(a) => {
            apply_common(&mut cfg, &a.common, true)?;
            commands::perturb(&cfg, &a.edge, a.eps)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
