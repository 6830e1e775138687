use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use mpc_precond::experiment::{
    bench_system, build_case, precondition_rows, sample_states, spectrum_rows, BenchRow, CaseConfig, PrecondMode,
};
use mpc_precond::fgm::{solve_fgm, FgmSettings, FgmStatus};
use mpc_precond::model::{builtin_system, load_model, TerminalCost, BUILTIN_NAMES};
use mpc_precond::{Error, System64};

use crate::args::{parse_horizons, parse_vector, BenchArgs, CommonArgs, PrecondArg, SolveArgs, SweepArgs, TerminalArg};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, model files or configurations; exit code 2.
    Config(anyhow::Error),
    /// Solver or factorisation failures; exit code 3.
    Numerical(anyhow::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::UnknownName(_)
            | Error::DimensionMismatch { .. }
            | Error::WrongDomain(_)
            | Error::Io(_)
            | Error::PreconditionerUnavailable(_)
            | Error::NotABox(_) => CliError::Config(e.into()),
            _ => CliError::Numerical(e.into()),
        }
    }
}

fn config(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(anyhow!("{msg}"))
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Built-in name, or a model file path.
fn resolve_system(name: &str) -> CliResult<System64> {
    if BUILTIN_NAMES.contains(&name) {
        return Ok(builtin_system(name)?);
    }
    let path = Path::new(name);
    if path.exists() {
        return Ok(load_model(path)?);
    }
    Err(config(format!(
        "unknown system `{name}`: expected one of {} or a model file path",
        BUILTIN_NAMES.join(", ")
    )))
}

fn terminal(arg: Option<TerminalArg>) -> Option<TerminalCost<f64>> {
    arg.map(|t| match t {
        TerminalArg::Q => TerminalCost::SameAsQ,
        TerminalArg::Dare => TerminalCost::DareSolution,
        TerminalArg::Dlyap => TerminalCost::DlyapSolution,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| config(format!("cannot write to stdout: {e}"))),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn case_config(common: &CommonArgs, precond: PrecondMode) -> CaseConfig<f64> {
    CaseConfig {
        prestabilize: common.prestabilize,
        terminal: terminal(common.terminal),
        precond,
        nonconforming: common.nonconforming,
    }
}

pub fn spectrum(a: &SweepArgs) -> CliResult {
    let system = resolve_system(&a.common.system)?;
    let horizons = parse_horizons(&a.horizons).map_err(config)?;
    let rows = spectrum_rows(&system, &horizons, a.common.prestabilize, terminal(a.common.terminal))?;
    if rows.first().is_some_and(|r| r.cond_bound.is_none()) {
        eprintln!("warning: predicted dynamics are not Schur-stable; bound column left empty");
    }
    let mut csv = String::from("N,cond_q,cond_p,cond_bound\n");
    for r in rows {
        let _ = writeln!(csv, "{},{},{},{}", r.horizon, r.cond_q, r.cond_p, opt(r.cond_bound));
    }
    emit(&a.common.out, &csv)
}

pub fn precondition(a: &SweepArgs) -> CliResult {
    let system = resolve_system(&a.common.system)?;
    let horizons = parse_horizons(&a.horizons).map_err(config)?;
    let mode = if a.identity_precond { PrecondMode::Identity } else { PrecondMode::Block };
    let rows = precondition_rows(&system, &horizons, &case_config(&a.common, mode))?;
    let mut csv = String::from("N,cond_orig,cond_strang,bound_strang\n");
    for r in rows {
        let _ = writeln!(csv, "{},{},{},{}", r.horizon, r.cond_orig, r.cond_strang, opt(r.bound_strang));
    }
    emit(&a.common.out, &csv)
}

pub fn solve(a: &SolveArgs) -> CliResult {
    let mut system = resolve_system(&a.common.system)?;
    if a.horizon == 0 {
        return Err(config("horizon must be at least 1"));
    }
    if let Some(r) = a.radius {
        system.state_radius = r;
    }
    let mode = match (a.precondition, a.identity_precond) {
        (_, true) => PrecondMode::Identity,
        (PrecondArg::Strang, false) => PrecondMode::Block,
        (PrecondArg::None, false) => PrecondMode::None,
    };
    let case = build_case(&system, a.horizon, &case_config(&a.common, mode))?;
    let qp = if a.unconstrained { case.qp.unconstrained() } else { case.qp };
    let x_hat = match &a.x {
        Some(text) => parse_vector(text).map_err(config)?,
        None => sample_states(qp.n, system.state_radius, 1, a.seed).remove(0),
    };
    if x_hat.len() != qp.n {
        return Err(config(format!("x has {} entries, the system has {} states", x_hat.len(), qp.n)));
    }
    let settings = FgmSettings {
        epsilon: a.epsilon,
        max_iters: a.max_iters,
        trace: a.common.out.is_some(),
        ..FgmSettings::default()
    };
    settings.validate()?;
    let rep = solve_fgm(&qp, &x_hat, settings)?;
    let status = match rep.status {
        FgmStatus::Converged => "converged",
        FgmStatus::IterCap => "iteration cap",
    };
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    println!("system: {}", system.name);
    println!("x_hat: {}", join(&x_hat));
    println!("status: {status}");
    println!("iterations: {}", rep.iterations);
    println!("grad_map_norm: {}", rep.grad_map_norm);
    println!("u0: {}", join(&rep.u0));
    if let Some(path) = &a.common.out {
        let mut csv = String::from("k,grad_map_norm,objective\n");
        for t in &rep.trace {
            let _ = writeln!(csv, "{},{},{}", t.k, t.grad_map_norm, t.objective);
        }
        emit(&Some(path.clone()), &csv)?;
    }
    Ok(())
}

fn bench_line(row: &BenchRow<f64>) -> String {
    let na = || "N/A".to_string();
    let kappa = row.kappa.map(|k| format!("{k:.3}")).unwrap_or_else(na);
    let (median, p90) = match &row.iterations {
        Some(s) => (s.median.to_string(), s.p90.to_string()),
        None => (na(), na()),
    };
    format!(
        "{},{},{},{kappa},{median},{p90}",
        row.system,
        if row.prestabilize { "lqr" } else { "none" },
        if row.precondition { "strang" } else { "none" },
    )
}

pub fn bench(a: &BenchArgs) -> CliResult {
    let names: Vec<String> = if a.system.is_empty() {
        BUILTIN_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        a.system.clone()
    };
    if a.draws == 0 {
        return Err(config("draws must be at least 1"));
    }
    let mut systems = Vec::with_capacity(names.len());
    for name in &names {
        let mut s = resolve_system(name)?;
        if let Some(r) = a.radius {
            s.state_radius = r;
        }
        systems.push(s);
    }
    if !systems.iter().any(|s| s.name.starts_with("distillation")) {
        eprintln!(
            "warning: distillation column omitted; its matrices are not shipped. \
             Supply them with --system <model file named distillation*.txt>"
        );
    }
    let settings = FgmSettings::default().with_epsilon(a.epsilon);
    settings.validate()?;
    let mut csv = String::from("system,prestab,precond,kappa,median_iters,p90_iters\n");
    for s in &systems {
        for row in bench_system(s, a.seed, a.draws, settings)? {
            if row.iterations.as_ref().is_some_and(|st| st.capped > 0) {
                eprintln!("warning: {} hit the iteration cap on some draws", row.system);
            }
            csv.push_str(&bench_line(&row));
            csv.push('\n');
        }
    }
    emit(&a.out, &csv)
}
