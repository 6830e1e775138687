//! Discrete algebraic Riccati and Lyapunov solvers, LQR gain and terminal
//! cost resolution.

use crate::error::{mismatch, Error, Result};
use crate::matkit::{chol_lower, Lu, Mat};
use crate::model::{check_schur_stability, kronecker_lyapunov, ClqrSpec, LtiModel, TerminalCost};
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DareSolution<T: Scalar> {
    pub p: Mat<T>,
    /// LQR gain `(BᵀPB + R)⁻¹BᵀPA`.
    pub k: Mat<T>,
    /// Frobenius norm of the DARE defect at `p`.
    pub residual: T,
    pub iterations: usize,
}

/// `AᵀPA + Q − AᵀPB(BᵀPB + R)⁻¹BᵀPA` together with the gain it implies.
fn riccati_step<T: Scalar>(a: &Mat<T>, b: &Mat<T>, q: &Mat<T>, r: &Mat<T>, p: &Mat<T>) -> Result<(Mat<T>, Mat<T>)> {
    let at = a.transpose();
    let bt = b.transpose();
    let pb = p * b;
    let btpb_r = &(&bt * &pb) + r;
    let btpa = &pb.transpose() * a;
    let k = Lu::factor(&btpb_r)?.solve(&btpa)?;
    let next = &(&(&(&at * p) * a) + q) - &(&btpa.transpose() * &k);
    Ok((next.hermitian_part(), k))
}

/// DARE defect `‖AᵀPA + Q − AᵀPB(BᵀPB+R)⁻¹BᵀPA − P‖_F`.
pub fn dare_residual<T: Scalar>(a: &Mat<T>, b: &Mat<T>, q: &Mat<T>, r: &Mat<T>, p: &Mat<T>) -> Result<T> {
    let (next, _) = riccati_step(a, b, q, r, p)?;
    Ok((&next - p).frobenius())
}

/// Solves the DARE by the Riccati fixed-point recursion started at `P₀ = Q`.
pub fn solve_dare<T: Scalar>(a: &Mat<T>, b: &Mat<T>, q: &Mat<T>, r: &Mat<T>) -> Result<DareSolution<T>> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || q.shape() != (n, n) || r.shape() != (b.cols(), b.cols()) {
        return Err(mismatch(
            "solve_dare",
            format!("A {n}x{n}, B {n}xm, Q {n}x{n}, R mxm"),
            format!("B {:?}, Q {:?}, R {:?}", b.shape(), q.shape(), r.shape()),
        ));
    }
    chol_lower(q)?;
    chol_lower(r)?;
    let step_tol = T::tol(1e-13);
    let defect_tol = T::tol(1e-10);
    let mut p = q.hermitian_part();
    let mut last_step = T::infinity();
    let mut growth = 0;
    for it in 1..=MAX_ITERATIONS {
        let (next, _) = riccati_step(a, b, q, r, &p)?;
        if !next.is_finite() {
            break;
        }
        let step = (&next - &p).frobenius();
        let scale = p.frobenius();
        if !step.is_finite() || !scale.is_finite() {
            break;
        }
        p = next;
        if step <= step_tol * scale {
            let (_, k) = riccati_step(a, b, q, r, &p)?;
            let residual = dare_residual(a, b, q, r, &p)?;
            if residual.is_finite() && residual <= defect_tol * p.frobenius() {
                return Ok(DareSolution {
                    p,
                    k,
                    residual,
                    iterations: it,
                });
            }
        }
        // the recursion from Q is monotone; a long run of growing steps means divergence
        if step > last_step && step > T::lit(1e6) * scale.max(T::one()) {
            growth += 1;
            if growth > 50 {
                return Err(Error::NoConvergence {
                    solver: "DARE fixed-point iteration",
                    iterations: it,
                });
            }
        }
        last_step = step;
    }
    Err(Error::NoConvergence {
        solver: "DARE fixed-point iteration",
        iterations: MAX_ITERATIONS,
    })
}

/// Solves `AᵀXA + Q = X` for Schur-stable `A`.
pub fn solve_dlyap<T: Scalar>(a: &Mat<T>, q: &Mat<T>) -> Result<Mat<T>> {
    let cert = check_schur_stability(a);
    if !cert.is_stable() {
        return Err(Error::NotStable(format!("{:?}: {}", cert.verdict, cert.note)));
    }
    if q.shape() != a.shape() {
        return Err(mismatch("solve_dlyap Q", format!("{:?}", a.shape()), format!("{:?}", q.shape())));
    }
    chol_lower(q)?;
    kronecker_lyapunov(a, q)
}

/// Terminal weight `P` and prestabilising gain `K` for a CLQR problem.
///
/// The gain is always the DARE LQR gain, except for `DlyapSolution`, which
/// pairs with `K = 0` on a Schur-stable plant.
pub fn resolve_terminal<T: Scalar>(spec: &ClqrSpec<T>, model: &LtiModel<T>) -> Result<(Mat<T>, Mat<T>)> {
    if !model.is_discrete() {
        return Err(Error::WrongDomain("terminal cost needs a discrete model".into()));
    }
    let (a, b) = (&model.a, &model.b);
    match &spec.terminal {
        TerminalCost::DlyapSolution => {
            let p = solve_dlyap(a, &spec.q)?;
            Ok((p, Mat::zeros(model.m(), model.n())))
        }
        TerminalCost::SameAsQ => {
            let dare = solve_dare(a, b, &spec.q, &spec.r)?;
            Ok((spec.q.clone(), dare.k))
        }
        TerminalCost::DareSolution => {
            let dare = solve_dare(a, b, &spec.q, &spec.r)?;
            Ok((dare.p, dare.k))
        }
        TerminalCost::Explicit(p) => {
            let dare = solve_dare(a, b, &spec.q, &spec.r)?;
            Ok((p.clone(), dare.k))
        }
    }
}
