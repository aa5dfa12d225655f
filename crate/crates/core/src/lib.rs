//! Value distribution of logarithms of Dirichlet L-functions.
//!
//! The crate computes the limiting densities of `log|L(σ, χ)|` over characters
//! of prime conductor and of `log L(σ, χ_D)` (or `L′/L`) over fundamental
//! discriminants, by Fourier inversion of their Euler-product characteristic
//! functions, and checks them against empirical family averages.
//!
//! Densities use the measure `du/√(2π)`: a density `M` has
//! `∫ M(u) du/√(2π) = 1` and characteristic function
//! `M̃(x) = ∫ M(u) e^{ixu} du/√(2π)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averages;
pub mod characters;
pub mod coefficients;
pub mod error;
pub mod fourier;
pub mod io;
pub mod lfunc;
pub mod local_factors;
pub mod par;
pub mod primes;
pub mod special;
pub mod summation;

pub use coefficients::LambdaMode;
pub use error::{Error, Result};
