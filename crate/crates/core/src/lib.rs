//! Recovery and separation of noisy, undersampled composite signals.
//!
//! A composite signal `β = β_Φ + β_Ψ` observed through `y = Xβ + z` is
//! recovered by solving a Dantzig selector over an overcomplete dictionary
//! `B = [Φ Ψ]` with a proximity-operator fixed-point iteration, then refit
//! by least squares on the recovered support. The crate provides:
//!
//! * [`dictionary`] — orthonormal transform blocks (identity, DFT, DCT,
//!   Haar, learned PCA bases) and their concatenation, with matrix-free
//!   apply/adjoint;
//! * [`sensing`] — seeded Gaussian and Bernoulli sensing matrices and the
//!   observation model;
//! * [`solver`] — problem assembly, the fixed-point iteration, stopping
//!   rules and the debiasing refit;
//! * [`experiments`] — reproducible synthetic-signal benchmark runs with
//!   aggregated error/time statistics;
//! * [`digits`] — PCA dictionary learning over labeled digit images and
//!   classification/separation of two-digit composites.
//!
//! Everything stochastic is driven by explicit 64-bit seeds; see [`rng`].

pub mod dictionary;
pub mod digits;
pub mod error;
pub mod experiments;
mod kernels;
pub mod rng;
pub mod sensing;
pub mod solver;

pub use error::{Error, Result};
