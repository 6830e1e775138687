use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::error::{mismatch, Result};
use crate::scalar::{Element, Scalar};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

/// Real matrix.
pub type Mat<T> = Matrix<T>;
/// Complex matrix.
pub type CMat<T> = Matrix<Complex<T>>;

impl<E: Element> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row-major data; fails when the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch(
                "Matrix::from_vec",
                rows * cols,
                data.len(),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[E]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn diag(values: &[E]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Column vector.
    pub fn column(values: &[E]) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn into_vec(self) -> Vec<E> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map<F: Element>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: E) -> Self {
        self.map(|x| x * s)
    }

    pub fn frobenius(&self) -> E::Real {
        self.data
            .iter()
            .map(|x| x.modulus_sqr())
            .fold(E::Real::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> E::Real {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.modulus())
                    .fold(E::Real::zero(), |a, b| a + b)
            })
            .fold(E::Real::zero(), |a, b| a.max(b))
    }

    pub fn max_abs(&self) -> E::Real {
        self.data
            .iter()
            .map(|x| x.modulus())
            .fold(E::Real::zero(), |a, b| a.max(b))
    }

    pub fn trace(&self) -> E {
        let n = self.rows.min(self.cols);
        (0..n).fold(E::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite_entry())
    }

    /// Copy of the `r × c` block starting at `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> Self {
        assert!(i0 + r <= self.rows && j0 + c <= self.cols, "block out of range");
        Self::from_fn(r, c, |i, j| self[(i0 + i, j0 + j)])
    }

    /// Writes `b` with its top-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, b: &Self) {
        assert!(
            i0 + b.rows <= self.rows && j0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            let dst = (i0 + i) * self.cols + j0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    /// Stacks matrices vertically.
    pub fn vstack(blocks: &[&Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(mismatch("vstack", cols, b.cols));
            }
            rows += b.rows;
            data.extend_from_slice(&b.data);
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Stacks matrices horizontally.
    pub fn hstack(blocks: &[&Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut j0 = 0;
        for b in blocks {
            if b.rows != rows {
                return Err(mismatch("hstack", rows, b.rows));
            }
            out.set_block(0, j0, b);
            j0 += b.cols;
        }
        Ok(out)
    }

    /// Matrix product, checking inner dimensions.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(mismatch(
                "matrix product",
                format!("{} rows", self.cols),
                format!("{} rows", rhs.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == E::zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · x` for a plain vector.
    pub fn mul_vec(&self, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(E::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `selfᵀ · x` without forming the transpose.
    pub fn tr_mul_vec(&self, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.rows, "tr_mul_vec dimension");
        let mut out = vec![E::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == E::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (p, q) = rhs.shape();
        Self::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)] * rhs[(i % p, j % q)]
        })
    }

    /// Relative deviation from Hermitian symmetry, `‖S − Sᴴ‖_F / ‖S‖_F`.
    pub fn hermitian_defect(&self) -> E::Real {
        if !self.is_square() {
            return E::Real::infinity();
        }
        let norm = self.frobenius();
        if norm == E::Real::zero() {
            return E::Real::zero();
        }
        let mut acc = E::Real::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).modulus_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// `(S + Sᴴ) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = E::from_real(E::Real::lit(0.5));
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }
}

impl<T: Scalar> Matrix<T> {
    /// Lifts a real matrix into the complex field.
    pub fn to_complex(&self) -> CMat<T> {
        self.map(|x| Complex::new(x, T::zero()))
    }

    /// Converts to `f64` entries.
    pub fn to_f64(&self) -> Mat<f64> {
        self.map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    /// Converts from `f64` entries.
    pub fn from_f64_mat(m: &Mat<f64>) -> Self {
        m.map(T::lit)
    }
}

impl<T: Scalar> Matrix<Complex<T>> {
    pub fn re(&self) -> Mat<T> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> Mat<T> {
        self.map(|z| z.im)
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Element> Mul for &Matrix<E> {
    type Output = Matrix<E>;
    /// Panics on incompatible shapes; use [`Matrix::try_mul`] to recover.
    fn mul(self, rhs: Self) -> Matrix<E> {
        self.try_mul(rhs).expect("matrix product shape")
    }
}

impl<E: Element> Add for &Matrix<E> {
    type Output = Matrix<E>;
    fn add(self, rhs: Self) -> Matrix<E> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<E: Element> Sub for &Matrix<E> {
    type Output = Matrix<E>;
    fn sub(self, rhs: Self) -> Matrix<E> {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<E: Element> Neg for &Matrix<E> {
    type Output = Matrix<E>;
    fn neg(self) -> Matrix<E> {
        self.map(|x| -x)
    }
}

impl<E: Element + fmt::Display> fmt::Display for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<E: fmt::Debug> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)))
            .finish()
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<E: Element>(a: &Matrix<E>, b: &Matrix<E>) -> Matrix<E> {
    a.kron(b)
}

/// Euclidean norm of a vector.
pub fn norm2<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}

/// Inner product.
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}
