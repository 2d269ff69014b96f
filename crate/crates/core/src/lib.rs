//! A desk-scale laboratory for GAN training dynamics viewed through control
//! theory: transfer functions and pole stability of the Dirac GAN family,
//! closed-loop control (CLC) in both its frequency-domain and time-domain
//! forms, time-domain simulators, and replay-buffer CLC-GAN training on a
//! synthetic Gaussian ring.
//!
//! The numeric core is generic over the scalar type. Polynomial and 2x2
//! system algebra accepts any [`Coeff`] (including `Rational64` for exact
//! comparisons); everything that integrates, finds roots or trains accepts a
//! [`Scalar`] (`f32` / `f64`). Concrete aliases for the common cases live at
//! the crate root.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvfmt;
pub mod diracgan;
pub mod error;
pub mod polyrat;
pub mod scalar;
pub mod simulate;
pub mod traingan;

pub use error::{Error, Result};
pub use scalar::{Coeff, Scalar};

pub use num_rational::Rational64;

pub type Polynomial64 = polyrat::Polynomial<f64>;
pub type PolynomialQ = polyrat::Polynomial<Rational64>;
pub type TransferFunction64 = polyrat::TransferFunction<f64>;
pub type TransferFunctionQ = polyrat::TransferFunction<Rational64>;
pub type ObjectiveSpec64 = diracgan::ObjectiveSpec<f64>;
pub type LinearizedSystem64 = diracgan::LinearizedSystem<f64>;
pub type LinearizedSystemQ = diracgan::LinearizedSystem<Rational64>;
pub type DiracState64 = diracgan::DiracState<f64>;
pub type Controller64 = diracgan::Controller<f64>;
pub type SimConfig64 = simulate::SimConfig<f64>;
pub type Trajectory64 = simulate::Trajectory<f64>;
pub type FuncSpaceState64 = simulate::FuncSpaceState<f64>;
pub type Mlp64 = traingan::Mlp<f64>;
pub type Mlp32 = traingan::Mlp<f32>;
pub type ReplayBuffer64 = traingan::ReplayBuffer<f64>;
pub type GaussianMixture64 = traingan::GaussianMixture<f64>;
