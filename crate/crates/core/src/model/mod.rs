//! LTI models, CLQR problem data, discretisation and stability certification.

mod catalog;
mod file;

pub use catalog::{builtin_system, builtin_systems, BUILTIN_NAMES};
pub use file::{load_model, parse_model, save_model, to_model_text};

use crate::error::{mismatch, Error, Result};
use crate::matkit::{chol_lower, is_positive_definite, kron, mat_exp, Lu, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDomain {
    Discrete,
    Continuous,
}

/// State-space pair `(A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiModel<T: Scalar> {
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub domain: TimeDomain,
    /// Set when the model was produced by discretising a continuous one.
    pub sample_time: Option<T>,
}

impl<T: Scalar> LtiModel<T> {
    pub fn new(a: Mat<T>, b: Mat<T>, domain: TimeDomain) -> Result<Self> {
        let n = a.rows();
        if n == 0 || !a.is_square() {
            return Err(mismatch("state matrix A", "nonempty square", format!("{:?}", a.shape())));
        }
        if b.rows() != n || b.cols() == 0 {
            return Err(mismatch(
                "input matrix B",
                format!("{n}xm with m >= 1"),
                format!("{}x{}", b.rows(), b.cols()),
            ));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: "non-finite model entry".into(),
            });
        }
        Ok(LtiModel {
            a,
            b,
            domain,
            sample_time: None,
        })
    }

    pub fn discrete(a: Mat<T>, b: Mat<T>) -> Result<Self> {
        Self::new(a, b, TimeDomain::Discrete)
    }

    pub fn continuous(a: Mat<T>, b: Mat<T>) -> Result<Self> {
        Self::new(a, b, TimeDomain::Continuous)
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Number of inputs.
    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn is_discrete(&self) -> bool {
        self.domain == TimeDomain::Discrete
    }
}

/// Terminal-cost policy for the last predicted state.
#[derive(Debug, Clone, PartialEq)]
pub enum TerminalCost<T: Scalar> {
    /// `P = Q` (the stage weight of the predicted system).
    SameAsQ,
    /// `P` solves the DARE.
    DareSolution,
    /// `P` solves `AᵀPA + Q = P`; only for Schur-stable `A`.
    DlyapSolution,
    Explicit(Mat<T>),
}

/// Weights, stage constraints `E_u u_k + E_x x_k ≤ c` and horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ClqrSpec<T: Scalar> {
    pub q: Mat<T>,
    pub r: Mat<T>,
    pub terminal: TerminalCost<T>,
    pub e_u: Mat<T>,
    pub e_x: Mat<T>,
    pub c: Vec<T>,
    pub horizon: usize,
}

impl<T: Scalar> ClqrSpec<T> {
    /// Validates shapes against `(n, m)` and certifies `Q`, `R` positive definite.
    pub fn new(
        n: usize,
        m: usize,
        q: Mat<T>,
        r: Mat<T>,
        terminal: TerminalCost<T>,
        e_u: Mat<T>,
        e_x: Mat<T>,
        c: Vec<T>,
        horizon: usize,
    ) -> Result<Self> {
        let spec = ClqrSpec {
            q,
            r,
            terminal,
            e_u,
            e_x,
            c,
            horizon,
        };
        spec.validate(n, m)?;
        Ok(spec)
    }

    /// Box `|u_i| ≤ bound_i` on every input, no state constraints.
    pub fn input_box(n: usize, q: Mat<T>, r: Mat<T>, bounds: &[T], horizon: usize) -> Result<Self> {
        let m = bounds.len();
        let eye = Mat::identity(m);
        let e_u = Mat::vstack(&[&eye, &(-&eye)])?;
        let c = bounds.iter().chain(bounds).copied().collect();
        Self::new(n, m, q, r, TerminalCost::SameAsQ, e_u, Mat::zeros(2 * m, n), c, horizon)
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        let l = self.c.len();
        if self.q.shape() != (n, n) {
            return Err(mismatch("Q", format!("{n}x{n}"), format!("{:?}", self.q.shape())));
        }
        if self.r.shape() != (m, m) {
            return Err(mismatch("R", format!("{m}x{m}"), format!("{:?}", self.r.shape())));
        }
        if self.e_u.shape() != (l, m) {
            return Err(mismatch("Eu", format!("{l}x{m}"), format!("{:?}", self.e_u.shape())));
        }
        if self.e_x.shape() != (l, n) {
            return Err(mismatch("Ex", format!("{l}x{n}"), format!("{:?}", self.e_x.shape())));
        }
        if let TerminalCost::Explicit(p) = &self.terminal {
            if p.shape() != (n, n) {
                return Err(mismatch("P", format!("{n}x{n}"), format!("{:?}", p.shape())));
            }
            chol_lower(p)?;
        }
        if self.horizon == 0 {
            return Err(mismatch("horizon", ">= 1", 0));
        }
        if self.c.iter().any(|x| x.is_nan()) {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: "constraint bound is NaN".into(),
            });
        }
        chol_lower(&self.q)?;
        chol_lower(&self.r)?;
        Ok(())
    }

    /// Number of stage constraint rows.
    pub fn l(&self) -> usize {
        self.c.len()
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        ClqrSpec {
            horizon,
            ..self.clone()
        }
    }

    pub fn with_terminal(&self, terminal: TerminalCost<T>) -> Self {
        ClqrSpec {
            terminal,
            ..self.clone()
        }
    }
}

/// A named problem: model, CLQR data and the sampling time used to discretise
/// a continuous model.
#[derive(Debug, Clone, PartialEq)]
pub struct System<T: Scalar> {
    pub name: String,
    pub model: LtiModel<T>,
    pub spec: ClqrSpec<T>,
    pub sample_time: Option<T>,
    /// Radius of the ball from which benchmark initial states are drawn.
    pub state_radius: T,
}

impl<T: Scalar> System<T> {
    /// The discrete-time model, discretising with `sample_time` if needed.
    pub fn discrete_model(&self) -> Result<LtiModel<T>> {
        match self.model.domain {
            TimeDomain::Discrete => Ok(self.model.clone()),
            TimeDomain::Continuous => {
                let ts = self.sample_time.ok_or_else(|| {
                    Error::WrongDomain("continuous model without a sample time".into())
                })?;
                zoh_discretize(&self.model, ts)
            }
        }
    }
}

/// Zero-order-hold discretisation through the exponential of the augmented
/// matrix `[[A·Ts, B·Ts], [0, 0]]`.
pub fn zoh_discretize<T: Scalar>(model: &LtiModel<T>, ts: T) -> Result<LtiModel<T>> {
    if model.domain != TimeDomain::Continuous {
        return Err(Error::WrongDomain("model is already discrete".into()));
    }
    if !(ts > T::zero()) || !ts.is_finite() {
        return Err(Error::WrongDomain(format!("sample time must be positive, got {ts}")));
    }
    let (n, m) = (model.n(), model.m());
    let mut aug = Mat::zeros(n + m, n + m);
    aug.set_block(0, 0, &model.a.scale(ts));
    aug.set_block(0, n, &model.b.scale(ts));
    let e = mat_exp(&aug);
    Ok(LtiModel {
        a: e.block(0, 0, n, n),
        b: e.block(0, n, n, m),
        domain: TimeDomain::Discrete,
        sample_time: Some(ts),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    SchurStable,
    NotSchurStable,
    /// Some eigenvalue product `λ_i λ_j` equals one and none exceeds the unit circle.
    Marginal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate<T: Scalar> {
    pub verdict: Stability,
    /// Solution of `AᵀXA − X = −I` when one was computed.
    pub witness: Option<Mat<T>>,
    pub note: String,
}

impl<T: Scalar> StabilityCertificate<T> {
    pub fn is_stable(&self) -> bool {
        self.verdict == Stability::SchurStable
    }
}

/// Solves `AᵀXA + Q = X` through `(I − Aᵀ⊗Aᵀ)·vec(X) = vec(Q)`.
pub(crate) fn kronecker_lyapunov<T: Scalar>(a: &Mat<T>, q: &Mat<T>) -> Result<Mat<T>> {
    let n = a.rows();
    let at = a.transpose();
    let system = &Mat::identity(n * n) - &kron(&at, &at);
    // row-major flattening of a symmetric right-hand side equals the column-major vec
    let rhs = Mat::column(q.as_slice());
    let x = Lu::factor(&system)?.solve(&rhs)?;
    let x = Mat::from_vec(n, n, x.into_vec())?;
    Ok(x.transpose().hermitian_part())
}

/// Certifies Schur stability with a discrete Lyapunov solve.
pub fn check_schur_stability<T: Scalar>(a: &Mat<T>) -> StabilityCertificate<T> {
    if !a.is_square() || a.rows() == 0 {
        return StabilityCertificate {
            verdict: Stability::NotSchurStable,
            witness: None,
            note: "matrix is not square".into(),
        };
    }
    let n = a.rows();
    match kronecker_lyapunov(a, &Mat::identity(n)) {
        Ok(x) => {
            let residual = &(&(&a.transpose() * &x) * a) - &x;
            let residual = (&residual + &Mat::identity(n)).frobenius();
            let pd = is_positive_definite(&x);
            if pd && residual <= T::tol(1e-8) * x.frobenius() {
                StabilityCertificate {
                    verdict: Stability::SchurStable,
                    witness: Some(x),
                    note: String::new(),
                }
            } else if pd {
                StabilityCertificate {
                    verdict: Stability::Marginal,
                    witness: Some(x),
                    note: format!("Lyapunov residual {residual} too large"),
                }
            } else {
                StabilityCertificate {
                    verdict: Stability::NotSchurStable,
                    witness: Some(x),
                    note: "Lyapunov solution is not positive definite".into(),
                }
            }
        }
        Err(Error::Singular { .. }) => {
            // λ_iλ_j = 1 for some pair. Shrinking A slightly separates the
            // unit-circle case from a reciprocal pair straddling it.
            let shrunk = a.scale(T::one() - T::tol(1e-6));
            let inner = check_schur_stability_nonsingular(&shrunk);
            if inner {
                StabilityCertificate {
                    verdict: Stability::Marginal,
                    witness: None,
                    note: "eigenvalue on the unit circle".into(),
                }
            } else {
                StabilityCertificate {
                    verdict: Stability::NotSchurStable,
                    witness: None,
                    note: "eigenvalue outside the unit circle".into(),
                }
            }
        }
        Err(e) => StabilityCertificate {
            verdict: Stability::NotSchurStable,
            witness: None,
            note: e.to_string(),
        },
    }
}

fn check_schur_stability_nonsingular<T: Scalar>(a: &Mat<T>) -> bool {
    let n = a.rows();
    kronecker_lyapunov(a, &Mat::identity(n))
        .map(|x| is_positive_definite(&x))
        .unwrap_or(false)
}
