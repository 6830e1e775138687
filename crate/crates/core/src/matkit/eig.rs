use crate::error::{Error, Result};
use crate::matkit::{check_square, CMat, Mat};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, column `k` pairs with `values[k]`.
    pub vectors: Mat<T>,
}

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi.
pub fn sym_eig<T: Scalar>(s: &Mat<T>) -> Result<SymEig<T>> {
    let (values, vectors) = jacobi(s, true)?;
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
    let n = values.len();
    Ok(SymEig {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: Mat::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    })
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigvals<T: Scalar>(s: &Mat<T>) -> Result<Vec<T>> {
    let (mut values, _) = jacobi(s, false)?;
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(values)
}

/// Ascending eigenvalues of a Hermitian matrix `X + iY`, read off the real
/// symmetric embedding `[[X, −Y], [Y, X]]` whose spectrum is doubled.
pub fn herm_eig<T: Scalar>(h: &CMat<T>) -> Result<Vec<T>> {
    check_square(h, "herm_eig")?;
    let asym = h.hermitian_defect();
    if asym > T::tol(1e-12) {
        return Err(Error::NonHermitian {
            asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = h.rows();
    let h = h.hermitian_part();
    let embed = Mat::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let doubled = sym_eigvals(&embed)?;
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a symmetric matrix.
pub fn sym_extremes<T: Scalar>(s: &Mat<T>) -> Result<(T, T)> {
    let v = sym_eigvals(s)?;
    Ok((v[0], v[v.len() - 1]))
}

/// Spectral condition number `λ_max / λ_min` of a symmetric positive-definite matrix.
pub fn sym_condition<T: Scalar>(s: &Mat<T>) -> Result<T> {
    let (lo, hi) = sym_extremes(s)?;
    Ok(hi / lo)
}

fn off_diagonal<T: Scalar>(a: &Mat<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

fn jacobi<T: Scalar>(s: &Mat<T>, want_vectors: bool) -> Result<(Vec<T>, Option<Mat<T>>)> {
    check_square(s, "sym_eig")?;
    let asym = s.hermitian_defect();
    if asym > T::tol(1e-12) {
        return Err(Error::NonSymmetric {
            asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = s.rows();
    let mut a = s.hermitian_part();
    let mut v = want_vectors.then(|| Mat::identity(n));
    let target = T::tol(1e-14) * a.frobenius();
    let mut sweeps = 0;
    while off_diagonal(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                solver: "jacobi eigensolver",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.is_zero() {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - sn * vkq;
                        v[(k, q)] = sn * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[(i, i)]).collect(), v))
}
