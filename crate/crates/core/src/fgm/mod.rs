//! Projected fast gradient method with constant momentum.
//!
//! Iterates `v⁺ = Π(y − ∇f(y)/L_f)`, `y ← v⁺ + β(v⁺ − v)` from `v = y = 0`
//! with `β = (√L_f − √μ)/(√L_f + √μ)`, and stops once the gradient map
//! `L_f‖y − v⁺‖` drops to `epsilon`.

mod projection;

pub use projection::{project_box, project_polytope, BoxStructure, PolytopeProjector};

use crate::condense::CondensedQp;
use crate::error::{mismatch, Error, Result};
use crate::matkit::{norm2, sym_extremes};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionKind {
    /// Box when every constraint row touches a single variable, else polytope.
    #[default]
    Auto,
    Box,
    PolytopeDual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgmSettings<T: Scalar> {
    pub epsilon: T,
    pub max_iters: usize,
    pub projection: ProjectionKind,
    /// Record `(k, gradient map, objective)` per iteration.
    pub trace: bool,
}

impl<T: Scalar> Default for FgmSettings<T> {
    fn default() -> Self {
        FgmSettings {
            epsilon: T::lit(1e-5),
            max_iters: 50_000,
            projection: ProjectionKind::Auto,
            trace: false,
        }
    }
}

impl<T: Scalar> FgmSettings<T> {
    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > T::zero()) || self.max_iters == 0 {
            return Err(Error::WrongDomain(format!(
                "FGM needs epsilon > 0 and max_iters ≥ 1 (got {}, {})",
                self.epsilon, self.max_iters
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgmStatus {
    Converged,
    IterCap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T: Scalar> {
    pub k: usize,
    pub grad_map_norm: T,
    pub objective: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FgmReport<T: Scalar> {
    /// Optimal `v`, mapped back through any preconditioning.
    pub v_star: Vec<T>,
    pub iterations: usize,
    pub grad_map_norm: T,
    pub status: FgmStatus,
    /// `u₀ = −K x̂ + v*₀`.
    pub u0: Vec<T>,
    pub trace: Vec<TraceRow<T>>,
}

#[derive(Debug, Clone)]
enum Projector<T: Scalar> {
    Free,
    Box(BoxStructure<T>),
    Polytope(PolytopeProjector<T>),
}

/// FGM bound to one QP; `μ`, `L_f` and the projector are set up once.
#[derive(Debug, Clone)]
pub struct FgmSolver<'a, T: Scalar> {
    qp: &'a CondensedQp<T>,
    settings: FgmSettings<T>,
    mu: T,
    lf: T,
    beta: T,
    projector: Projector<T>,
}

impl<'a, T: Scalar> FgmSolver<'a, T> {
    pub fn new(qp: &'a CondensedQp<T>, settings: FgmSettings<T>) -> Result<Self> {
        settings.validate()?;
        let (mu, lf) = sym_extremes(&qp.h)?;
        if !(mu > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                index: 0,
                pivot: mu.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (sl, sm) = (lf.sqrt(), mu.sqrt());
        let projector = if qp.g_mat.rows() == 0 {
            Projector::Free
        } else {
            match settings.projection {
                ProjectionKind::Box => Projector::Box(BoxStructure::new(&qp.g_mat)?),
                ProjectionKind::PolytopeDual => Projector::Polytope(PolytopeProjector::new(&qp.g_mat)?),
                ProjectionKind::Auto => match BoxStructure::new(&qp.g_mat) {
                    Ok(b) => Projector::Box(b),
                    Err(_) => Projector::Polytope(PolytopeProjector::new(&qp.g_mat)?),
                },
            }
        };
        Ok(FgmSolver {
            qp,
            settings,
            mu,
            lf,
            beta: (sl - sm) / (sl + sm),
            projector,
        })
    }

    /// `(μ, L_f)` used for the step and momentum.
    pub fn curvature(&self) -> (T, T) {
        (self.mu, self.lf)
    }

    pub fn uses_box(&self) -> bool {
        matches!(self.projector, Projector::Box(_) | Projector::Free)
    }

    /// Cold-started solve.
    pub fn solve(&mut self, x_hat: &[T]) -> Result<FgmReport<T>> {
        let start = vec![T::zero(); self.qp.dim()];
        self.solve_from(x_hat, &start)
    }

    /// Solve started from the solver-space point `w0`.
    pub fn solve_from(&mut self, x_hat: &[T], w0: &[T]) -> Result<FgmReport<T>> {
        let qp = self.qp;
        let dim = qp.dim();
        if x_hat.len() != qp.n {
            return Err(mismatch("x_hat", qp.n.to_string(), x_hat.len().to_string()));
        }
        if w0.len() != dim {
            return Err(mismatch("FGM start", dim.to_string(), w0.len().to_string()));
        }
        let lin = qp.linear_term(x_hat);
        let rhs = qp.constraint_rhs(x_hat);
        let bounds = match &self.projector {
            Projector::Box(bs) => Some(bs.bounds(&rhs)?),
            _ => None,
        };
        if let Projector::Polytope(p) = &mut self.projector {
            p.reset();
        }
        let inv_lf = T::one() / self.lf;
        let mut v = w0.to_vec();
        let mut y = w0.to_vec();
        let mut trace = Vec::new();
        let mut gm = T::infinity();
        for k in 0..self.settings.max_iters {
            let hy = qp.h.mul_vec(&y);
            let step: Vec<T> = y
                .iter()
                .zip(hy.iter().zip(&lin))
                .map(|(&yi, (&h, &l))| yi - inv_lf * (h + l))
                .collect();
            let next = match (&mut self.projector, &bounds) {
                (Projector::Box(_), Some((lo, hi))) => project_box(&step, lo, hi),
                (Projector::Polytope(p), _) => p.project(&step, &rhs)?,
                _ => step,
            };
            let diff: Vec<T> = y.iter().zip(&next).map(|(&a, &b)| a - b).collect();
            gm = self.lf * norm2(&diff);
            if self.settings.trace {
                trace.push(TraceRow {
                    k,
                    grad_map_norm: gm,
                    objective: qp.objective(&next, x_hat),
                });
            }
            if gm <= self.settings.epsilon {
                return Ok(self.report(next, k, gm, FgmStatus::Converged, x_hat, trace));
            }
            y = next.iter().zip(&v).map(|(&a, &b)| a + self.beta * (a - b)).collect();
            v = next;
        }
        let iters = self.settings.max_iters;
        Ok(self.report(v, iters, gm, FgmStatus::IterCap, x_hat, trace))
    }

    fn report(&self, w: Vec<T>, iterations: usize, gm: T, status: FgmStatus, x_hat: &[T], trace: Vec<TraceRow<T>>) -> FgmReport<T> {
        let qp = self.qp;
        let v_star = qp.recover(&w);
        let kx = qp.k.mul_vec(x_hat);
        let u0 = (0..qp.m).map(|i| v_star[i] - kx[i]).collect();
        FgmReport {
            v_star,
            iterations,
            grad_map_norm: gm,
            status,
            u0,
            trace,
        }
    }
}

/// Cold-started FGM solve of `qp` at `x_hat`.
pub fn solve_fgm<T: Scalar>(qp: &CondensedQp<T>, x_hat: &[T], settings: FgmSettings<T>) -> Result<FgmReport<T>> {
    FgmSolver::new(qp, settings)?.solve(x_hat)
}

/// FGM solve started from the solver-space point `w0`.
pub fn solve_fgm_from<T: Scalar>(qp: &CondensedQp<T>, x_hat: &[T], w0: &[T], settings: FgmSettings<T>) -> Result<FgmReport<T>> {
    FgmSolver::new(qp, settings)?.solve_from(x_hat, w0)
}
