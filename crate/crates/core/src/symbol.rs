//! Matrix symbols of the prediction matrix and the condensed Hessian.
//!
//! For Schur-stable `A_c` the infinite prediction operator is block Toeplitz
//! with symbol `z(zI − A_c)⁻¹B`, and the Hessian operator has symbol
//! `P_Γ(z)ᴴ Q_c P_Γ(z) + R`. The extreme eigenvalues of the Hessian symbol
//! over the unit circle bound the spectrum of every finite-horizon Hessian.

use num_complex::Complex;

use crate::condense::{CondensedQp, PredictionDynamics};
use crate::error::{mismatch, Error, Result};
use crate::matkit::{clu_solve, herm_eig, sym_eigvals, CMat, Mat};
use crate::model::check_schur_stability;
use crate::scalar::Scalar;

/// Default number of grid points on `[0, π]`.
pub const DEFAULT_GRID: usize = 4096;
/// Default relative tolerance for golden-section refinement.
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;
const MIN_FOURIER_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Prediction,
    Hessian,
    PreconditionedHessian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSymbol<T: Scalar> {
    pub kind: SymbolKind,
    pub a_c: Mat<T>,
    pub b: Mat<T>,
    pub q_c: Mat<T>,
    pub r: Mat<T>,
    /// `L̄` in `L̄ P_H L̄ᴴ`; only set for the preconditioned kind.
    pub transform: Option<Mat<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds<T: Scalar> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub kappa: T,
    pub grid_points: usize,
    pub argmin_theta: T,
    pub argmax_theta: T,
}

/// Outcome of a successful containment check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentReport<T: Scalar> {
    pub horizon: usize,
    pub eig_min: T,
    pub eig_max: T,
    /// `eig_min − lambda_min`; negative values are within tolerance.
    pub lower_margin: T,
    /// `lambda_max − eig_max`.
    pub upper_margin: T,
    pub tolerance: T,
}

impl<T: Scalar> MatrixSymbol<T> {
    fn build(kind: SymbolKind, a_c: &Mat<T>, b: &Mat<T>, q_c: &Mat<T>, r: &Mat<T>) -> Result<Self> {
        let n = a_c.rows();
        if !a_c.is_square() || b.rows() != n {
            return Err(mismatch("symbol A_c/B", format!("{n}x{n} and {n}xm"), format!("{:?}, {:?}", a_c.shape(), b.shape())));
        }
        if q_c.shape() != (n, n) || r.shape() != (b.cols(), b.cols()) {
            return Err(mismatch("symbol weights", format!("Q {n}x{n}, R {0}x{0}", b.cols()), format!("{:?}, {:?}", q_c.shape(), r.shape())));
        }
        let cert = check_schur_stability(a_c);
        if !cert.is_stable() {
            return Err(Error::SymbolUnavailable(format!(
                "predicted dynamics are {:?}; the Toeplitz series diverges",
                cert.verdict
            )));
        }
        Ok(MatrixSymbol {
            kind,
            a_c: a_c.clone(),
            b: b.clone(),
            q_c: q_c.clone(),
            r: r.clone(),
            transform: None,
        })
    }

    pub fn prediction(a_c: &Mat<T>, b: &Mat<T>) -> Result<Self> {
        let n = a_c.rows();
        let m = b.cols();
        Self::build(SymbolKind::Prediction, a_c, b, &Mat::identity(n), &Mat::identity(m))
    }

    pub fn hessian(a_c: &Mat<T>, b: &Mat<T>, q_c: &Mat<T>, r: &Mat<T>) -> Result<Self> {
        Self::build(SymbolKind::Hessian, a_c, b, q_c, r)
    }

    pub fn from_dynamics(d: &PredictionDynamics<T>) -> Result<Self> {
        Self::hessian(&d.a_c, &d.b, &d.q_c, &d.r)
    }

    /// Attaches `L̄`, turning a Hessian symbol into `L̄ P_H L̄ᴴ`.
    pub fn with_transform(&self, l_bar: &Mat<T>) -> Result<Self> {
        if self.kind != SymbolKind::Hessian {
            return Err(Error::SymbolUnavailable(format!("cannot precondition a {:?} symbol", self.kind)));
        }
        let m = self.b.cols();
        if l_bar.shape() != (m, m) {
            return Err(mismatch("symbol transform", format!("{m}x{m}"), format!("{:?}", l_bar.shape())));
        }
        Ok(MatrixSymbol {
            kind: SymbolKind::PreconditionedHessian,
            transform: Some(l_bar.clone()),
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.a_c.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    /// `z(zI − A_c)⁻¹B` at `z = e^{iθ}`.
    fn prediction_at(&self, theta: T) -> Result<CMat<T>> {
        let n = self.n();
        let z = Complex::from_polar(T::one(), theta);
        let mut resolvent = self.a_c.to_complex().scale(Complex::new(-T::one(), T::zero()));
        for i in 0..n {
            resolvent[(i, i)] += z;
        }
        let zb = self.b.to_complex().scale(z);
        clu_solve(&resolvent, &zb).map_err(|e| match e {
            Error::Singular { .. } => Error::SingularResolvent { theta: theta.to_f64().unwrap_or(f64::NAN) },
            other => other,
        })
    }

    /// Evaluates the symbol at `e^{iθ}`.
    pub fn eval(&self, theta: T) -> Result<CMat<T>> {
        let pg = self.prediction_at(theta)?;
        if self.kind == SymbolKind::Prediction {
            return Ok(pg);
        }
        let ph = &(&(&pg.adjoint() * &self.q_c.to_complex()) * &pg) + &self.r.to_complex();
        let out = match (&self.kind, &self.transform) {
            (SymbolKind::PreconditionedHessian, Some(l)) => {
                let lc = l.to_complex();
                &(&lc * &ph) * &lc.adjoint()
            }
            _ => ph,
        };
        Ok(out.hermitian_part())
    }

    /// Smallest and largest eigenvalue of the symbol at `θ`.
    fn extremes_at(&self, theta: T) -> Result<(T, T)> {
        let v = herm_eig(&self.eval(theta)?)?;
        Ok((v[0], v[v.len() - 1]))
    }

    /// Extreme eigenvalues over the unit circle.
    ///
    /// Samples `grid` uniform angles on `[0, π]` and refines both extrema
    /// by golden-section search on the neighbouring grid cells.
    pub fn bounds(&self, grid: usize, refine_tol: T) -> Result<SpectralBounds<T>> {
        if self.kind == SymbolKind::Prediction {
            return Err(Error::SymbolUnavailable("spectral bounds need a Hermitian symbol".into()));
        }
        if grid < 16 || !grid.is_power_of_two() {
            return Err(Error::SymbolUnavailable(format!("grid must be a power of two ≥ 16, got {grid}")));
        }
        let step = T::PI() / T::of_usize(grid - 1);
        let mut lo = (T::infinity(), 0);
        let mut hi = (T::neg_infinity(), 0);
        for i in 0..grid {
            let (a, b) = self.extremes_at(step * T::of_usize(i))?;
            if a < lo.0 {
                lo = (a, i);
            }
            if b > hi.0 {
                hi = (b, i);
            }
        }
        let cell = |i: usize| {
            let left = if i == 0 { T::zero() } else { step * T::of_usize(i - 1) };
            let right = if i + 1 == grid { T::PI() } else { step * T::of_usize(i + 1) };
            (left, right)
        };
        let (l0, l1) = cell(lo.1);
        let (min_theta, lambda_min) =
            golden_section(l0, l1, (step * T::of_usize(lo.1), lo.0), refine_tol, |t| Ok(self.extremes_at(t)?.0))?;
        let (h0, h1) = cell(hi.1);
        let (max_theta, neg_max) = golden_section(h0, h1, (step * T::of_usize(hi.1), -hi.0), refine_tol, |t| {
            Ok(-self.extremes_at(t)?.1)
        })?;
        let lambda_max = -neg_max;
        Ok(SpectralBounds {
            lambda_min,
            lambda_max,
            kappa: lambda_max / lambda_min,
            grid_points: grid,
            argmin_theta: min_theta,
            argmax_theta: max_theta,
        })
    }

    /// `symbol_bounds` with the default grid and tolerance.
    pub fn default_bounds(&self) -> Result<SpectralBounds<T>> {
        self.bounds(DEFAULT_GRID, T::lit(DEFAULT_REFINE_TOL))
    }

    /// Fourier coefficients `(1/2π)∫ P(e^{iθ}) e^{ijθ} dθ` for `j = 0..count`.
    ///
    /// Uses the trapezoid rule, which converges geometrically for these
    /// rational symbols. Coefficient `j` of the prediction symbol is `A_cʲB`;
    /// of the Hessian symbol it is the block `(i + j, i)` of the infinite
    /// Hessian.
    pub fn fourier_coefficients(&self, count: usize) -> Result<Vec<Mat<T>>> {
        let points = MIN_FOURIER_POINTS.max((4 * count).next_power_of_two());
        let step = T::lit(2.0) * T::PI() / T::of_usize(points);
        let mut acc: Vec<CMat<T>> = Vec::new();
        for p in 0..points {
            let theta = step * T::of_usize(p);
            let val = self.eval(theta)?;
            if acc.is_empty() {
                acc = vec![CMat::zeros(val.rows(), val.cols()); count];
            }
            for (j, a) in acc.iter_mut().enumerate() {
                let w = Complex::from_polar(T::one(), theta * T::of_usize(j));
                *a = &*a + &val.scale(w);
            }
        }
        let inv = T::one() / T::of_usize(points);
        Ok(acc.into_iter().map(|a| a.re().scale(inv)).collect())
    }
}

/// Minimises `f` on `[a, b]` starting from a known sample `(x, f(x))`.
fn golden_section<T: Scalar>(
    mut a: T,
    mut b: T,
    best: (T, T),
    rel_tol: T,
    f: impl Fn(T) -> Result<T>,
) -> Result<(T, T)> {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut best = best;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        let prev = best.1;
        for (x, fx) in [(c, fc), (d, fd)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
        let change = (prev - best.1).abs();
        if (b - a) <= T::epsilon() * T::lit(4.0) || (change > T::zero() && change <= rel_tol * best.1.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        if (b - a) <= rel_tol * (T::one() + a.abs()) {
            for (x, fx) in [(c, fc), (d, fd)] {
                if fx < best.1 {
                    best = (x, fx);
                }
            }
            break;
        }
    }
    Ok(best)
}

/// Checks that every eigenvalue of `qp.h` lies in `[λ_min − tol, λ_max + tol]`
/// with `tol = 1e-8·λ_max`.
pub fn verify_containment<T: Scalar>(qp: &CondensedQp<T>, bounds: &SpectralBounds<T>) -> Result<ContainmentReport<T>> {
    let eig = sym_eigvals(&qp.h)?;
    let tol = T::lit(1e-8) * bounds.lambda_max;
    let lo = bounds.lambda_min - tol;
    let hi = bounds.lambda_max + tol;
    if let Some(&bad) = eig.iter().find(|&&e| e < lo || e > hi) {
        return Err(Error::ContainmentViolated {
            eigenvalue: bad.to_f64().unwrap_or(f64::NAN),
            horizon: qp.horizon,
            lower: bounds.lambda_min.to_f64().unwrap_or(f64::NAN),
            upper: bounds.lambda_max.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (eig_min, eig_max) = (eig[0], eig[eig.len() - 1]);
    Ok(ContainmentReport {
        horizon: qp.horizon,
        eig_min,
        eig_max,
        lower_margin: eig_min - bounds.lambda_min,
        upper_margin: bounds.lambda_max - eig_max,
        tolerance: tol,
    })
}
