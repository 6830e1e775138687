//! Condensed QP construction for the plain and prestabilised formulations.
//!
//! Stacking `v = (v₀, …, v_{N−1})` and the predicted states `x₁ … x_N`, the
//! QP is
//!
//! ```text
//! min ½ vᵀ H v + x̂ᵀ Φᵀ v   s.t.   G v ≤ F x̂ + g
//! ```
//!
//! with `H = Γᵀ Q̄ Γ + I_N ⊗ R`, `Q̄ = blkdiag(I_{N−1} ⊗ Q_c, P)` and `Φ = Γᵀ Q̄ Λ`.

use crate::error::{mismatch, Error, Result};
use crate::matkit::{chol_lower, Mat};
use crate::model::{check_schur_stability, ClqrSpec, LtiModel, StabilityCertificate, TerminalCost};
use crate::riccati::{solve_dare, solve_dlyap};
use crate::scalar::Scalar;

/// Prediction matrices of `x_{k+1} = A_c x_k + B v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionPair<T: Scalar> {
    /// `(N·n)×(N·m)`, block `(i, j)` is `A_c^{i−j} B` for `i ≥ j`.
    pub gamma: Mat<T>,
    /// `(N·n)×n`, block `k` is `A_c^{k+1}`.
    pub lambda: Mat<T>,
    pub horizon: usize,
    pub n: usize,
    pub m: usize,
}

impl<T: Scalar> PredictionPair<T> {
    pub fn gamma_block(&self, i: usize, j: usize) -> Mat<T> {
        self.gamma.block(i * self.n, j * self.m, self.n, self.m)
    }

    /// `A_c^{k}`, with `k = 0` giving the identity.
    pub fn state_power(&self, k: usize) -> Mat<T> {
        if k == 0 {
            Mat::identity(self.n)
        } else {
            self.lambda.block((k - 1) * self.n, 0, self.n, self.n)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedQp<T: Scalar> {
    pub h: Mat<T>,
    /// The gradient at `v` is `H v + Φ x̂`.
    pub phi: Mat<T>,
    pub g_mat: Mat<T>,
    pub f_mat: Mat<T>,
    pub g_vec: Vec<T>,
    /// Prestabilising gain (`u_k = −K x_k + v_k`); zero without prestabilisation.
    pub k: Mat<T>,
    pub horizon: usize,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    /// Certificate for the predicted dynamics `A_c`.
    pub stability: StabilityCertificate<T>,
    /// Maps solver variables back to `v`; set by preconditioning.
    pub recovery: Option<Mat<T>>,
}

impl<T: Scalar> CondensedQp<T> {
    /// Right-hand side `F x̂ + g`.
    pub fn constraint_rhs(&self, x_hat: &[T]) -> Vec<T> {
        self.f_mat
            .mul_vec(x_hat)
            .into_iter()
            .zip(&self.g_vec)
            .map(|(a, &b)| a + b)
            .collect()
    }

    /// Linear term `Φ x̂`.
    pub fn linear_term(&self, x_hat: &[T]) -> Vec<T> {
        self.phi.mul_vec(x_hat)
    }

    /// `½ vᵀHv + (Φx̂)ᵀv`.
    pub fn objective(&self, v: &[T], x_hat: &[T]) -> T {
        let hv = self.h.mul_vec(v);
        let lin = self.linear_term(x_hat);
        v.iter()
            .zip(hv.iter().zip(&lin))
            .map(|(&vi, (&hi, &li))| T::lit(0.5) * vi * hi + li * vi)
            .sum()
    }

    /// Same cost, constraints dropped.
    pub fn unconstrained(&self) -> Self {
        let dim = self.horizon * self.m;
        CondensedQp {
            g_mat: Mat::zeros(0, dim),
            f_mat: Mat::zeros(0, self.n),
            g_vec: Vec::new(),
            l: 0,
            ..self.clone()
        }
    }

    /// Number of decision variables, `N·m`.
    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// Maps a solver-space vector back to `v`.
    pub fn recover(&self, w: &[T]) -> Vec<T> {
        match &self.recovery {
            Some(r) => r.mul_vec(w),
            None => w.to_vec(),
        }
    }
}

/// Builds `Γ` and `Λ` by the block recurrence.
pub fn build_prediction<T: Scalar>(a_c: &Mat<T>, b: &Mat<T>, horizon: usize) -> Result<PredictionPair<T>> {
    let n = a_c.rows();
    let m = b.cols();
    if !a_c.is_square() || b.rows() != n {
        return Err(mismatch("build_prediction", format!("B with {n} rows"), b.rows()));
    }
    if horizon == 0 {
        return Err(mismatch("build_prediction horizon", ">= 1", 0));
    }
    let mut gamma = Mat::zeros(horizon * n, horizon * m);
    let mut lambda = Mat::zeros(horizon * n, n);
    // first block column: B, A_c B, A_c² B, ...
    let mut col = b.clone();
    let mut power = a_c.clone();
    for i in 0..horizon {
        if i > 0 {
            col = a_c * &col;
            power = a_c * &power;
        }
        lambda.set_block(i * n, 0, &power);
        for j in 0..horizon - i {
            gamma.set_block((i + j) * n, j * m, &col);
        }
    }
    Ok(PredictionPair {
        gamma,
        lambda,
        horizon,
        n,
        m,
    })
}

/// `Q̄·M` for `Q̄ = blkdiag(I_{N−1} ⊗ Q_c, P)` without forming `Q̄`.
fn weight_rows<T: Scalar>(pred: &PredictionPair<T>, q_c: &Mat<T>, p: &Mat<T>, rhs: &Mat<T>) -> Mat<T> {
    let n = pred.n;
    let mut out = Mat::zeros(rhs.rows(), rhs.cols());
    for i in 0..pred.horizon {
        let w = if i + 1 == pred.horizon { p } else { q_c };
        let blk = rhs.block(i * n, 0, n, rhs.cols());
        out.set_block(i * n, 0, &(w * &blk));
    }
    out
}

/// `H = ΓᵀQ̄Γ + I_N ⊗ R`, symmetrised.
pub fn build_hessian<T: Scalar>(pred: &PredictionPair<T>, q_c: &Mat<T>, p: &Mat<T>, r: &Mat<T>) -> Result<Mat<T>> {
    let (n, m) = (pred.n, pred.m);
    if q_c.shape() != (n, n) || p.shape() != (n, n) || r.shape() != (m, m) {
        return Err(mismatch(
            "build_hessian",
            format!("Q_c, P {n}x{n}, R {m}x{m}"),
            format!("{:?} {:?} {:?}", q_c.shape(), p.shape(), r.shape()),
        ));
    }
    let qg = weight_rows(pred, q_c, p, &pred.gamma);
    let mut h = &pred.gamma.transpose() * &qg;
    for k in 0..pred.horizon {
        let blk = &h.block(k * m, k * m, m, m) + r;
        h.set_block(k * m, k * m, &blk);
    }
    Ok(h.hermitian_part())
}

/// `Φ = ΓᵀQ̄Λ`.
pub fn build_linear_map<T: Scalar>(pred: &PredictionPair<T>, q_c: &Mat<T>, p: &Mat<T>) -> Result<Mat<T>> {
    let n = pred.n;
    if q_c.shape() != (n, n) || p.shape() != (n, n) {
        return Err(mismatch("build_linear_map", format!("{n}x{n}"), format!("{:?}", q_c.shape())));
    }
    let ql = weight_rows(pred, q_c, p, &pred.lambda);
    Ok(&pred.gamma.transpose() * &ql)
}

/// Stage constraints `E_u u_k + E_x x_k ≤ c` under `u_k = −K x_k + v_k`,
/// expressed as `G v ≤ F x̂ + g`.
pub fn build_constraints<T: Scalar>(
    spec: &ClqrSpec<T>,
    k: &Mat<T>,
    pred: &PredictionPair<T>,
) -> Result<(Mat<T>, Mat<T>, Vec<T>)> {
    let (n, m, horizon) = (pred.n, pred.m, pred.horizon);
    let l = spec.l();
    if k.shape() != (m, n) {
        return Err(mismatch("build_constraints K", format!("{m}x{n}"), format!("{:?}", k.shape())));
    }
    let e_bar = &spec.e_x - &(&spec.e_u * k);
    let mut g = Mat::zeros(horizon * l, horizon * m);
    let mut f = Mat::zeros(horizon * l, n);
    for stage in 0..horizon {
        g.set_block(stage * l, stage * m, &spec.e_u);
        for j in 0..stage {
            g.set_block(stage * l, j * m, &(&e_bar * &pred.gamma_block(stage - 1, j)));
        }
        f.set_block(stage * l, 0, &(-&(&e_bar * &pred.state_power(stage))));
    }
    let gv = (0..horizon).flat_map(|_| spec.c.iter().copied()).collect();
    Ok((g, f, gv))
}

/// Predicted dynamics and weights shared by the QP and its symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionDynamics<T: Scalar> {
    pub a_c: Mat<T>,
    pub b: Mat<T>,
    pub q_c: Mat<T>,
    pub r: Mat<T>,
    /// Terminal weight resolved from `spec.terminal`.
    pub p: Mat<T>,
    pub k: Mat<T>,
}

/// Resolves `A_c`, `Q_c`, `P` and `K`.
///
/// With `prestabilize`, `A_c = A − BK` with `K` the LQR gain and
/// `Q_c = Q + KᵀRK`; otherwise `A_c = A`, `Q_c = Q`, `K = 0`. The terminal
/// weight follows `spec.terminal`, where `SameAsQ` means `P = Q_c`.
pub fn prediction_dynamics<T: Scalar>(
    model: &LtiModel<T>,
    spec: &ClqrSpec<T>,
    prestabilize: bool,
) -> Result<PredictionDynamics<T>> {
    if !model.is_discrete() {
        return Err(Error::WrongDomain("condense needs a discrete model".into()));
    }
    spec.validate(model.n(), model.m())?;
    let (a, b) = (&model.a, &model.b);
    let needs_dare = prestabilize || spec.terminal == TerminalCost::DareSolution;
    let dare = if needs_dare {
        Some(solve_dare(a, b, &spec.q, &spec.r)?)
    } else {
        None
    };
    let (a_c, q_c, k) = match (&dare, prestabilize) {
        (Some(d), true) => {
            let a_c = a - &(b * &d.k);
            let q_c = (&spec.q + &(&(&d.k.transpose() * &spec.r) * &d.k)).hermitian_part();
            (a_c, q_c, d.k.clone())
        }
        _ => (a.clone(), spec.q.clone(), Mat::zeros(model.m(), model.n())),
    };
    let p = match &spec.terminal {
        TerminalCost::SameAsQ => q_c.clone(),
        TerminalCost::DareSolution => dare.as_ref().expect("DARE solved above").p.clone(),
        TerminalCost::DlyapSolution => solve_dlyap(&a_c, &q_c)?,
        TerminalCost::Explicit(p) => p.clone(),
    };
    Ok(PredictionDynamics {
        a_c,
        b: b.clone(),
        q_c,
        r: spec.r.clone(),
        p,
        k,
    })
}

/// Assembles the condensed QP; see [`prediction_dynamics`] for the
/// meaning of `prestabilize`.
pub fn condense<T: Scalar>(model: &LtiModel<T>, spec: &ClqrSpec<T>, prestabilize: bool) -> Result<CondensedQp<T>> {
    let d = prediction_dynamics(model, spec, prestabilize)?;
    condense_with(&d.a_c, &d.b, &d.q_c, &d.p, &d.k, spec)
}

/// Assembles the QP from explicit constituents (`A_c`, `B`, `Q_c`, `P`, `K`).
pub fn condense_with<T: Scalar>(
    a_c: &Mat<T>,
    b: &Mat<T>,
    q_c: &Mat<T>,
    p: &Mat<T>,
    k: &Mat<T>,
    spec: &ClqrSpec<T>,
) -> Result<CondensedQp<T>> {
    let pred = build_prediction(a_c, b, spec.horizon)?;
    let h = build_hessian(&pred, q_c, p, &spec.r)?;
    chol_lower(&h)?;
    let phi = build_linear_map(&pred, q_c, p)?;
    let (g_mat, f_mat, g_vec) = build_constraints(spec, k, &pred)?;
    Ok(CondensedQp {
        h,
        phi,
        g_mat,
        f_mat,
        g_vec,
        k: k.clone(),
        horizon: spec.horizon,
        n: pred.n,
        m: pred.m,
        l: spec.l(),
        stability: check_schur_stability(a_c),
        recovery: None,
    })
}
