//! Condensed constrained-LQR quadratic programs, block-Toeplitz spectral
//! bounds for their Hessians, a horizon-independent block preconditioner and
//! a projected Fast Gradient Method.
//!
//! All numerical routines are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which every tolerance in the
//! crate is calibrated for.

pub mod condense;
pub mod error;
pub mod experiment;
pub mod fgm;
pub mod matkit;
pub mod model;
pub mod precond;
pub mod riccati;
pub mod scalar;
pub mod symbol;

pub use error::{Error, Result};
pub use scalar::{Element, Scalar};

pub type Mat64 = matkit::Mat<f64>;
pub type CMat64 = matkit::CMat<f64>;
pub type LtiModel64 = model::LtiModel<f64>;
pub type ClqrSpec64 = model::ClqrSpec<f64>;
pub type System64 = model::System<f64>;
pub type DareSolution64 = riccati::DareSolution<f64>;
pub type CondensedQp64 = condense::CondensedQp<f64>;




pub type MatrixSymbol64 = symbol::MatrixSymbol<f64>;
pub type SpectralBounds64 = symbol::SpectralBounds<f64>;
pub type BlockPreconditioner64 = precond::BlockPreconditioner<f64>;
pub type FgmSettings64 = fgm::FgmSettings<f64>;
pub type FgmReport64 = fgm::FgmReport<f64>;
