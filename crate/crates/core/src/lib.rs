//! Maturity randomization for finite-horizon stochastic control problems.
//!
//! A fixed horizon `T` is replaced by an Erlang-distributed horizon, the sum of
//! `n` independent exponential clocks with rate `n / T`. Each clock turns the
//! finite-horizon problem into a time-homogeneous one, so the value is obtained
//! by iterating `n` one-dimensional free-boundary problems:
//!
//! * [`put`]: the randomized American put, each stage solved semi-analytically
//!   with smooth pasting, plus Richardson acceleration and a binomial oracle.
//! * [`uvm`]: super-replication under uncertain volatility `σ₁ ≤ ν ≤ σ₂`, where
//!   each stage is an explicit integral operator `T_b` with a unique
//!   convexity-switch boundary `b`.
//! * [`digital`]: the `σ₁ = 0` digital option with its exact value.
//! * [`bounds`]: Erlang mixtures, Monte-Carlo lower bounds and a
//!   Black–Scholes–Barenblatt finite-difference oracle used to check the
//!   recursion from both sides.
//!
//! Numerics are generic over [`Real`] (`f32` / `f64`); the `*64` aliases below
//! name the `f64` instantiations used by the CLI and the test-suite.

// `!(x > 0)` is how input checks here reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod digital;
mod error;
pub mod numerics;
pub mod put;
mod real;
pub mod uvm;

pub use error::{Error, Result};
pub use real::Real;

pub type GridFunction64 = numerics::GridFunction<f64>;
pub type LogGrid64 = numerics::LogGrid<f64>;
pub type UvmModel64 = uvm::UvmModel<f64>;
pub type Exponents64 = uvm::Exponents<f64>;
pub type StageFunction64 = uvm::StageFunction<f64>;
pub type Payoff64 = uvm::Payoff<f64>;
pub type DigitalModel64 = digital::DigitalModel<f64>;
pub type PutModel64 = put::PutModel<f64>;
pub type PutStage64 = put::PutStage<f64>;
pub type ErlangHorizon64 = bounds::ErlangHorizon<f64>;
