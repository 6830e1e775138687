//! Dense real/complex linear-algebra kernels.

mod chol;
mod dense;
mod eig;
mod expm;
mod lu;

pub use chol::{chol_lower, is_positive_definite, lower_triangular_inverse};
pub use dense::{dot, kron, norm2, CMat, Mat, Matrix};
pub use eig::{herm_eig, sym_condition, sym_eig, sym_eigvals, sym_extremes, SymEig};
pub use expm::mat_exp;
pub use lu::{clu_solve, determinant, inverse, lu_solve, Lu};

use crate::error::{mismatch, Result};
use crate::scalar::Element;

pub(crate) fn check_square<E: Element>(a: &Matrix<E>, context: &str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(mismatch(
            context,
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ))
    }
}
