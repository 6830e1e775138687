//! Horizon-independent block preconditioner `L_N = I_N ⊗ L`, with
//! `L Lᵀ = M = BᵀPB + R` and `P` the DARE solution.

use crate::condense::CondensedQp;
use crate::error::{mismatch, Result};
use crate::matkit::{chol_lower, lower_triangular_inverse, Mat};
use crate::model::{ClqrSpec, LtiModel};
use crate::riccati::solve_dare;
use crate::scalar::Scalar;
use crate::symbol::MatrixSymbol;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPreconditioner<T: Scalar> {
    pub m: Mat<T>,
    /// Lower Cholesky factor of `m`.
    pub l: Mat<T>,
    pub l_inv: Mat<T>,
}

impl<T: Scalar> BlockPreconditioner<T> {
    /// `M = BᵀPB + R` for an arbitrary cost-to-go `P`.
    pub fn new(b: &Mat<T>, p: &Mat<T>, r: &Mat<T>) -> Result<Self> {
        let n = b.rows();
        let m = b.cols();
        if p.shape() != (n, n) || r.shape() != (m, m) {
            return Err(mismatch(
                "preconditioner P/R",
                format!("P {n}x{n}, R {m}x{m}"),
                format!("P {:?}, R {:?}", p.shape(), r.shape()),
            ));
        }
        let block = (&(&(&b.transpose() * p) * b) + r).hermitian_part();
        Self::from_block(block)
    }

    /// Factors a given symmetric positive definite block.
    pub fn from_block(m: Mat<T>) -> Result<Self> {
        let l = chol_lower(&m)?;
        let l_inv = lower_triangular_inverse(&l);
        Ok(BlockPreconditioner { m, l, l_inv })
    }

    /// `L = I`, which leaves every QP unchanged.
    pub fn identity(m: usize) -> Self {
        BlockPreconditioner {
            m: Mat::identity(m),
            l: Mat::identity(m),
            l_inv: Mat::identity(m),
        }
    }

    pub fn block_size(&self) -> usize {
        self.m.rows()
    }

    /// `I_N ⊗ L⁻¹`.
    pub fn stacked_inverse(&self, horizon: usize) -> Mat<T> {
        Mat::identity(horizon).kron(&self.l_inv)
    }
}

/// Builds the preconditioner from the DARE solution of `(A, B, Q, R)`.
///
/// The horizon in `spec` is never read.
pub fn build_preconditioner<T: Scalar>(model: &LtiModel<T>, spec: &ClqrSpec<T>) -> Result<BlockPreconditioner<T>> {
    let dare = solve_dare(&model.a, &model.b, &spec.q, &spec.r)?;
    BlockPreconditioner::new(&model.b, &dare.p, &spec.r)
}

/// Substitutes `v = L_N⁻ᵀ w` in the QP.
pub fn apply_to_qp<T: Scalar>(qp: &CondensedQp<T>, pc: &BlockPreconditioner<T>) -> Result<CondensedQp<T>> {
    if pc.block_size() != qp.m {
        return Err(mismatch("preconditioner block", qp.m.to_string(), pc.block_size().to_string()));
    }
    let li = pc.stacked_inverse(qp.horizon);
    let lit = li.transpose();
    let h = (&(&li * &qp.h) * &lit).hermitian_part();
    let phi = &li * &qp.phi;
    let g_mat = &qp.g_mat * &lit;
    let recovery = match &qp.recovery {
        Some(r) => r * &lit,
        None => lit,
    };
    Ok(CondensedQp {
        h,
        phi,
        g_mat,
        recovery: Some(recovery),
        ..qp.clone()
    })
}

/// `L⁻¹ P_H L⁻ᵀ`.
pub fn preconditioned_symbol<T: Scalar>(sym: &MatrixSymbol<T>, pc: &BlockPreconditioner<T>) -> Result<MatrixSymbol<T>> {
    sym.with_transform(&pc.l_inv)
}
