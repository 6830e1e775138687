use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mpc-precond", version, about = "Conditioning and FGM experiments for condensed MPC problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Condition number of the Hessian versus horizon, with the symbol bound.
    Spectrum(SweepArgs),
    /// Condition number before and after block preconditioning versus horizon.
    Precondition(SweepArgs),
    /// Solve one QP with the fast gradient method.
    Solve(SolveArgs),
    /// Condition numbers and FGM iteration statistics at N = 10.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TerminalArg {
    Q,
    Dare,
    Dlyap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum PrecondArg {
    #[default]
    None,
    Strang,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Built-in system name or path to a model file.
    #[arg(long, default_value = "schur-stable")]
    pub system: String,
    /// Terminal weight; defaults to DLYAP for stable open-loop runs and DARE otherwise.
    #[arg(long, value_enum)]
    pub terminal: Option<TerminalArg>,
    /// Substitute u = -Kx + v with the LQR gain K.
    #[arg(long)]
    pub prestabilize: bool,
    /// Allow the block preconditioner outside P = DARE (prestabilised) or P = DLYAP (stable plant).
    #[arg(long)]
    pub nonconforming: bool,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Horizons: inclusive ranges `a..b` and single values, comma separated.
    #[arg(long = "n", default_value = "1..60")]
    pub horizons: String,
    /// Use L = I instead of the Cholesky factor (precondition only).
    #[arg(long)]
    pub identity_precond: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long = "n", default_value_t = 10)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value_t = PrecondArg::None)]
    pub precondition: PrecondArg,
    #[arg(long)]
    pub identity_precond: bool,
    /// Initial state, comma separated; drawn from the seeded sphere when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 50_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Radius of the sampling sphere; defaults to the system's own.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Drop all inequality constraints.
    #[arg(long)]
    pub unconstrained: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Built-in names or model files; defaults to every built-in system.
    #[arg(long)]
    pub system: Vec<String>,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `1..5,10,20..22` into `[1, 2, 3, 4, 5, 10, 20, 21, 22]`.
pub fn parse_horizons(spec: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid horizon `{s}` in `{spec}`"))
        };
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty horizon range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse(part)?);
        }
    }
    if out.is_empty() {
        return Err("no horizons given".into());
    }
    if out.contains(&0) {
        return Err("horizons must be at least 1".into());
    }
    Ok(out)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid number `{}`", s.trim()))
        })
        .collect()
}
