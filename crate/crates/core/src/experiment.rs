//! Horizon sweeps, benchmark cells and seeded initial-state sampling.
//!
//! Every number the command-line tool prints is produced here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::condense::{condense, prediction_dynamics, CondensedQp};
use crate::error::{Error, Result};
use crate::fgm::{FgmSettings, FgmSolver, FgmStatus};
use crate::matkit::{sym_condition, sym_extremes, Mat};
use crate::model::{check_schur_stability, ClqrSpec, LtiModel, System, TerminalCost};
use crate::precond::{apply_to_qp, build_preconditioner, preconditioned_symbol, BlockPreconditioner};
use crate::scalar::Scalar;
use crate::symbol::MatrixSymbol;

/// Number of random initial states per benchmark cell.
pub const BENCH_DRAWS: usize = 100;
/// Horizon used by the benchmark table.
pub const BENCH_HORIZON: usize = 10;

/// Terminal weight `P` of the second spectrum column: DARE when the
/// predicted dynamics need it, otherwise the open-loop Lyapunov solution.
pub fn default_terminal<T: Scalar>(model: &LtiModel<T>, prestabilize: bool) -> TerminalCost<T> {
    if !prestabilize && check_schur_stability(&model.a).is_stable() {
        TerminalCost::DlyapSolution
    } else {
        TerminalCost::DareSolution
    }
}

/// Whether the DARE-based block preconditioner is covered by theory for this
/// configuration: `K` the LQR gain with `P` the DARE solution, or `K = 0`
/// on a Schur-stable plant with the Lyapunov terminal weight.
pub fn preconditioner_conforms<T: Scalar>(model: &LtiModel<T>, prestabilize: bool, terminal: &TerminalCost<T>) -> bool {
    match (prestabilize, terminal) {
        (true, TerminalCost::DareSolution) => true,
        (false, TerminalCost::DlyapSolution) => check_schur_stability(&model.a).is_stable(),
        _ => false,
    }
}

/// How the block preconditioner is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecondMode {
    None,
    /// `M = BᵀPB + R` with `P` from the DARE.
    Block,
    /// `L = I`, for debugging.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig<T: Scalar> {
    pub prestabilize: bool,
    /// `None` selects [`default_terminal`].
    pub terminal: Option<TerminalCost<T>>,
    pub precond: PrecondMode,
    /// Allow the block preconditioner outside [`preconditioner_conforms`].
    pub nonconforming: bool,
}

impl<T: Scalar> Default for CaseConfig<T> {
    fn default() -> Self {
        CaseConfig {
            prestabilize: false,
            terminal: None,
            precond: PrecondMode::None,
            nonconforming: false,
        }
    }
}

/// A condensed (and possibly preconditioned) QP ready for the solver.
#[derive(Debug, Clone)]
pub struct Case<T: Scalar> {
    pub model: LtiModel<T>,
    pub spec: ClqrSpec<T>,
    pub qp: CondensedQp<T>,
    pub preconditioner: Option<BlockPreconditioner<T>>,
}

fn resolve_preconditioner<T: Scalar>(
    model: &LtiModel<T>,
    spec: &ClqrSpec<T>,
    cfg: &CaseConfig<T>,
) -> Result<Option<BlockPreconditioner<T>>> {
    match cfg.precond {
        PrecondMode::None => Ok(None),
        PrecondMode::Identity => Ok(Some(BlockPreconditioner::identity(model.m()))),
        PrecondMode::Block => {
            if !cfg.nonconforming && !preconditioner_conforms(model, cfg.prestabilize, &spec.terminal) {
                return Err(Error::PreconditionerUnavailable(if cfg.prestabilize {
                    "the block preconditioner needs P = DARE with prestabilisation".into()
                } else {
                    "without prestabilisation the block preconditioner needs a Schur-stable plant and P = DLYAP".into()
                }));
            }
            Ok(Some(build_preconditioner(model, spec)?))
        }
    }
}

/// Builds the QP of `system` at `horizon`.
pub fn build_case<T: Scalar>(system: &System<T>, horizon: usize, cfg: &CaseConfig<T>) -> Result<Case<T>> {
    let model = system.discrete_model()?;
    let terminal = cfg
        .terminal
        .clone()
        .unwrap_or_else(|| default_terminal(&model, cfg.prestabilize));
    let spec = system.spec.with_horizon(horizon).with_terminal(terminal);
    let pc = resolve_preconditioner(&model, &spec, cfg)?;
    let mut qp = condense(&model, &spec, cfg.prestabilize)?;
    if let Some(pc) = &pc {
        qp = apply_to_qp(&qp, pc)?;
    }
    Ok(Case {
        model,
        spec,
        qp,
        preconditioner: pc,
    })
}

/// κ of the horizon-independent bound, or `None` when the predicted
/// dynamics are not Schur-stable.
pub fn symbol_kappa<T: Scalar>(
    model: &LtiModel<T>,
    spec: &ClqrSpec<T>,
    prestabilize: bool,
    pc: Option<&BlockPreconditioner<T>>,
) -> Result<Option<T>> {
    let d = prediction_dynamics(model, spec, prestabilize)?;
    let sym = match MatrixSymbol::from_dynamics(&d) {
        Ok(s) => s,
        Err(Error::SymbolUnavailable(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sym = match pc {
        Some(pc) => preconditioned_symbol(&sym, pc)?,
        None => sym,
    };
    Ok(Some(sym.default_bounds()?.kappa))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow<T: Scalar> {
    pub horizon: usize,
    /// κ(H) with `P = Q` (`Q_c` when prestabilised).
    pub cond_q: T,
    /// κ(H) with the configured terminal weight.
    pub cond_p: T,
    pub cond_bound: Option<T>,
}

/// Condition numbers of the Hessian over a horizon sweep.
pub fn spectrum_rows<T: Scalar>(
    system: &System<T>,
    horizons: &[usize],
    prestabilize: bool,
    terminal: Option<TerminalCost<T>>,
) -> Result<Vec<SpectrumRow<T>>> {
    let model = system.discrete_model()?;
    let terminal = terminal.unwrap_or_else(|| default_terminal(&model, prestabilize));
    let bound = symbol_kappa(&model, &system.spec, prestabilize, None)?;
    horizons
        .iter()
        .map(|&n| {
            let spec = system.spec.with_horizon(n);
            let hq = condense(&model, &spec.with_terminal(TerminalCost::SameAsQ), prestabilize)?;
            let hp = condense(&model, &spec.with_terminal(terminal.clone()), prestabilize)?;
            Ok(SpectrumRow {
                horizon: n,
                cond_q: sym_condition(&hq.h)?,
                cond_p: sym_condition(&hp.h)?,
                cond_bound: bound,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreconditionRow<T: Scalar> {
    pub horizon: usize,
    pub cond_orig: T,
    pub cond_strang: T,
    pub bound_strang: Option<T>,
}

/// Condition numbers before and after block preconditioning over a sweep.
///
/// `cfg.precond` selects the block or identity factor; `None` is treated
/// as the block preconditioner.
pub fn precondition_rows<T: Scalar>(system: &System<T>, horizons: &[usize], cfg: &CaseConfig<T>) -> Result<Vec<PreconditionRow<T>>> {
    let model = system.discrete_model()?;
    let terminal = cfg
        .terminal
        .clone()
        .unwrap_or_else(|| default_terminal(&model, cfg.prestabilize));
    let base = system.spec.with_terminal(terminal);
    let mode = if cfg.precond == PrecondMode::None { PrecondMode::Block } else { cfg.precond };
    let pc_cfg = CaseConfig { precond: mode, ..cfg.clone() };
    let pc = resolve_preconditioner(&model, &base, &pc_cfg)?.expect("mode is not None");
    let bound = symbol_kappa(&model, &base, cfg.prestabilize, Some(&pc))?;
    horizons
        .iter()
        .map(|&n| {
            let qp = condense(&model, &base.with_horizon(n), cfg.prestabilize)?;
            let pq = apply_to_qp(&qp, &pc)?;
            Ok(PreconditionRow {
                horizon: n,
                cond_orig: sym_condition(&qp.h)?,
                cond_strang: sym_condition(&pq.h)?,
                bound_strang: bound,
            })
        })
        .collect()
}

/// `count` points drawn uniformly from the sphere of the given radius in `ℝⁿ`.
pub fn sample_states<T: Scalar>(n: usize, radius: T, count: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break g.iter().map(|&x| radius * T::lit(x / norm)).collect();
            }
        })
        .collect()
}

/// Summary of FGM iteration counts over a sample of initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub median: f64,
    /// Nearest-rank 90th percentile.
    pub p90: usize,
    pub counts: Vec<usize>,
    pub capped: usize,
}

impl IterationStats {
    pub fn from_counts(mut counts: Vec<usize>, capped: usize) -> Self {
        counts.sort_unstable();
        let n = counts.len();
        let median = if n == 0 {
            f64::NAN
        } else if n % 2 == 1 {
            counts[n / 2] as f64
        } else {
            (counts[n / 2 - 1] + counts[n / 2]) as f64 / 2.0
        };
        let p90 = if n == 0 { 0 } else { counts[((9 * n).div_ceil(10)).max(1) - 1] };
        IterationStats { median, p90, counts, capped }
    }
}

/// Cold-start FGM iteration counts for each state.
pub fn iteration_stats<T: Scalar>(qp: &CondensedQp<T>, states: &[Vec<T>], settings: FgmSettings<T>) -> Result<IterationStats> {
    let mut solver = FgmSolver::new(qp, settings)?;
    let mut counts = Vec::with_capacity(states.len());
    let mut capped = 0;
    for x in states {
        let rep = solver.solve(x)?;
        if rep.status == FgmStatus::IterCap {
            capped += 1;
        }
        counts.push(rep.iterations);
    }
    Ok(IterationStats::from_counts(counts, capped))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow<T: Scalar> {
    pub system: String,
    pub prestabilize: bool,
    pub precondition: bool,
    /// `None` where the preconditioner is not available.
    pub kappa: Option<T>,
    pub iterations: Option<IterationStats>,
}

/// One benchmark cell at `BENCH_HORIZON` with the default terminal weight.
pub fn bench_cell<T: Scalar>(
    system: &System<T>,
    prestabilize: bool,
    precondition: bool,
    states: &[Vec<T>],
    settings: FgmSettings<T>,
) -> Result<BenchRow<T>> {
    let cfg = CaseConfig {
        prestabilize,
        precond: if precondition { PrecondMode::Block } else { PrecondMode::None },
        ..CaseConfig::default()
    };
    let row = |kappa, iterations| BenchRow {
        system: system.name.clone(),
        prestabilize,
        precondition,
        kappa,
        iterations,
    };
    let case = match build_case(system, BENCH_HORIZON, &cfg) {
        Ok(c) => c,
        Err(Error::PreconditionerUnavailable(_)) => return Ok(row(None, None)),
        Err(e) => return Err(e),
    };
    let kappa = sym_condition(&case.qp.h)?;
    let stats = iteration_stats(&case.qp, states, settings)?;
    Ok(row(Some(kappa), Some(stats)))
}

/// All four (prestabilise, precondition) cells of one system.
pub fn bench_system<T: Scalar>(system: &System<T>, seed: u64, draws: usize, settings: FgmSettings<T>) -> Result<Vec<BenchRow<T>>> {
    let states = sample_states(system.model.n(), system.state_radius, draws, seed);
    let mut rows = Vec::with_capacity(4);
    for prestabilize in [false, true] {
        for precondition in [false, true] {
            rows.push(bench_cell(system, prestabilize, precondition, &states, settings)?);
        }
    }
    Ok(rows)
}

/// Random `(A, B)` with `‖A‖₂ = radius`, entries of `B` uniform in `[−1, 1]`.
pub fn random_stable_pair<T: Scalar>(n: usize, m: usize, radius: T, seed: u64) -> Result<(Mat<T>, Mat<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    let a: Mat<T> = Mat::from_fn(n, n, |_, _| T::lit(dist.sample(&mut rng)));
    let b: Mat<T> = Mat::from_fn(n, m, |_, _| T::lit(dist.sample(&mut rng)));
    let spectral = sym_extremes(&(&a.transpose() * &a))?.1.sqrt();
    if spectral == T::zero() {
        return Ok((a, b));
    }
    Ok((a.scale(radius / spectral), b))
}
