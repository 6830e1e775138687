use num_complex::Complex;
use num_traits::{Float, One, ToPrimitive, Zero};

use crate::error::{mismatch, Error, Result};
use crate::matkit::{check_square, CMat, Mat, Matrix};
use crate::scalar::{Element, Scalar};

/// LU factorisation with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu<E: Element> {
    lu: Matrix<E>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<E: Element> Lu<E> {
    /// Factors `a`; fails with `Singular` when a pivot modulus drops below
    /// `n·eps·‖A‖_∞`.
    pub fn factor(a: &Matrix<E>) -> Result<Self> {
        check_square(a, "lu")?;
        let n = a.rows();
        let threshold = E::Real::of_usize(n) * E::Real::epsilon() * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, E::Real::zero() - E::Real::one()), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
            if !(pmax >= threshold) || pmax == E::Real::zero() {
                return Err(Error::Singular {
                    index: k,
                    pivot: pmax.to_f64().unwrap_or(f64::NAN),
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == E::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A·X = B`.
    pub fn solve(&self, b: &Matrix<E>) -> Result<Matrix<E>> {
        let n = self.dim();
        if b.rows() != n {
            return Err(mismatch("lu solve", n, b.rows()));
        }
        let k = b.cols();
        let mut x = Matrix::from_fn(n, k, |i, j| b[(self.perm[i], j)]);
        for c in 0..k {
            for i in 0..n {
                let mut acc = x[(i, c)];
                for j in 0..i {
                    acc -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for j in i + 1..n {
                    acc -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = acc / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[E]) -> Result<Vec<E>> {
        Ok(self.solve(&Matrix::column(b))?.into_vec())
    }

    pub fn determinant(&self) -> E {
        let mut d = E::one();
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Matrix<E> {
        self.solve(&Matrix::identity(self.dim()))
            .expect("identity has matching rows")
    }
}

/// Solves `A·X = B` for real `A`.
pub fn lu_solve<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    Lu::factor(a)?.solve(b)
}

/// Solves `A·X = B` in complex arithmetic.
pub fn clu_solve<T: Scalar>(a: &CMat<T>, b: &CMat<T>) -> Result<CMat<T>> {
    Lu::<Complex<T>>::factor(a)?.solve(b)
}

/// Explicit inverse of a real square matrix.
pub fn inverse<T: Scalar>(a: &Mat<T>) -> Result<Mat<T>> {
    Ok(Lu::factor(a)?.inverse())
}

/// Determinant via LU (zero when the factorisation reports singularity).
pub fn determinant<T: Scalar>(a: &Mat<T>) -> Result<T> {
    match Lu::factor(a) {
        Ok(lu) => Ok(lu.determinant()),
        Err(Error::Singular { .. }) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}
