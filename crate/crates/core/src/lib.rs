//! Eigenvalues of ordinary differential operators in a region of the complex
//! plane by filtered subspace iteration on functions.
//!
//! Functions are adaptive Chebyshev series ([`chebfun::ChebFun`]); spectral
//! projectors are applied through shifted boundary-value solves
//! ([`ode::ShiftSolver`]) combined by a rational filter ([`filters`]); the
//! filtered basis is orthonormalized in a weighted inner product
//! ([`quasimatrix`]) and the operator is projected onto it
//! ([`eigensolver::contfeast`]). Single eigenpairs can be refined with
//! Rayleigh quotient iteration ([`rqi`]).

pub mod chebfun;
pub mod dense;
pub mod eigensolver;
pub mod error;
pub mod filters;
pub mod ode;
pub mod problems;
pub mod quadrature;
pub mod quasimatrix;
pub mod random;
pub mod rqi;
pub mod weight;

pub use chebfun::{ChebFun, Interval};
pub use eigensolver::{contfeast, EigResult, EigenProblem, FeastConfig, Operator, Reseed};
pub use error::{Error, Result};
pub use filters::{FilterSpec, RationalFilter};
pub use num_complex::Complex64 as C64;
pub use ode::{BoundaryConditions, LinDiffOp};
pub use quasimatrix::Quasimatrix;
pub use weight::Weight;
