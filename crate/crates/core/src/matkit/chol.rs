use crate::error::{Error, Result};
use crate::matkit::{check_square, Mat};
use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = S`.
///
/// Rejects inputs whose relative asymmetry exceeds `1e-12` and pivots at or
/// below `n·eps·max(diag S)`.
pub fn chol_lower<T: Scalar>(s: &Mat<T>) -> Result<Mat<T>> {
    check_square(s, "chol_lower")?;
    let asym = s.hermitian_defect();
    if asym > T::tol(1e-12) {
        return Err(Error::NonSymmetric {
            asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = s.rows();
    let max_diag = (0..n).map(|i| s[(i, i)]).fold(T::zero(), T::max);
    let floor = T::of_usize(n) * T::epsilon() * max_diag;
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: d.to_f64().unwrap_or(f64::NAN),
            });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            // average the two triangles so slight asymmetry does not bias the factor
            let mut v = (s[(i, j)] + s[(j, i)]) * T::lit(0.5);
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    Ok(l)
}

/// Whether `s` is symmetric positive definite per [`chol_lower`].
pub fn is_positive_definite<T: Scalar>(s: &Mat<T>) -> bool {
    chol_lower(s).is_ok()
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_triangular_inverse<T: Scalar>(l: &Mat<T>) -> Mat<T> {
    let n = l.rows();
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = T::one() / l[(j, j)];
        for i in j + 1..n {
            let mut acc = T::zero();
            for k in j..i {
                acc += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc / l[(i, i)];
        }
    }
    inv
}
