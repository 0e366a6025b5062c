//! Numerical certification of eigenvalue lower bounds for the
//! Witten-Laplacian `Δ_φ = Δ - ∇φ·∇` and of the diameter bounds they imply
//! for shrinking Ricci solitons and curve-shortening self-shrinkers.
//!
//! - [`bounds`]: closed-form bounds and the brute-force sup oracle.
//! - [`sturm`]: the 1D comparison operator `v'' - K x v'`.
//! - [`spectral`]: discrete Witten-Laplacians on circles, curves and spheres.
//! - [`shrinkers`]: circles, Abresch-Langer curves, the Gaussian soliton.
//! - [`cli`]: the `witten-gap` command-line front end.

// negated comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod shrinkers;
pub mod spectral;
pub mod sturm;
pub mod suite;
pub mod tridiag;

pub use error::{Error, Result};
pub use report::VerificationReport;
