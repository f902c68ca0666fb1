//! The (N,M)-bigraded Toda hierarchy.
//!
//! Exact multivariate polynomials over the hierarchy times, band difference
//! operators on a periodic lattice, tau functions from moment matrices and
//! from Schur-polynomial determinants, bilinear residual checks, Lax flows
//! and the (N,M) to (M,N) Miura correspondence.

pub mod flows;
pub mod hirota_check;
pub mod lattice_ops;
pub mod miura;
pub mod polytime;
pub mod signature;
pub mod tau_engine;

pub use signature::{Side, Signature};

/// Exact rational coefficient type used by every symbolic computation.
pub type Q = num_rational::BigRational;
