mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "symtomo", version, about = "Symmetric tensor field tomography toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Grid points per axis, e.g. `33` (2-D) or `17x17x17`; the box is `[-1,1]^n`.
    #[arg(long, global = true, default_value = "33")]
    pub grid: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Output file (or directory for commands that write several files).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a tensor field into trace-free parts, or run the Helmholtz-type solve.
    Decompose(commands::DecomposeArgs),
    /// Forward momentum ray transform of a set of fields.
    Mrt(commands::MrtArgs),
    /// Separate combined transform data into per-order values.
    Separate(commands::SeparateArgs),
    /// Probe the kernel of the restricted transform.
    Kernel(commands::KernelArgs),
    /// Gauge invariance experiment for `e^{-phi} (-Laplacian)^m e^{phi}`.
    GaugeCheck(commands::GaugeArgs),
    /// Evaluate the linearized integral identity for a coefficient set.
    Identity(commands::IdentityArgs),
    /// Write a built-in phantom.
    #[command(subcommand)]
    Phantom(commands::PhantomKind),
    /// Check the hypotheses placed on the top coefficient.
    Hypotheses(commands::HypothesesArgs),
    /// Run the moment-recovery pipeline on a planted coefficient set.
    Recover(commands::RecoverArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Decompose(a) => commands::decompose(g, a),
        Command::Mrt(a) => commands::mrt(g, a),
        Command::Separate(a) => commands::separate(g, a),
        Command::Kernel(a) => commands::kernel(g, a),
        Command::GaugeCheck(a) => commands::gauge_check(g, a),
        Command::Identity(a) => commands::identity(g, a),
        Command::Phantom(k) => commands::phantom(g, k),
        Command::Hypotheses(a) => commands::hypotheses(g, a),
        Command::Recover(a) => commands::recover(g, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
