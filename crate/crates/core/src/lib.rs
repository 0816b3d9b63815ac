//! Finite-length scaling of LDPC codes on the binary erasure channel.
//!
//! The bit erasure probability of BP decoding after `t` iterations at block
//! length `n` behaves as `P_b(∞, ε, t) + α(ε, t)/n + o(1/n)`. This crate
//! computes every piece of that expansion and the tools to check it:
//!
//! - [`ensemble`]: degree distribution pairs and polynomial evaluation
//! - [`density`]: density evolution and the BP threshold
//! - [`scaling`]: β, γ and α in extended precision
//! - [`sim`]: configuration-model sampling, BP decoding, Monte Carlo and exact
//!   enumeration for tiny codes

pub mod density;
pub mod ensemble;
pub mod error;
pub mod real;
pub mod scaling;
pub mod sim;

pub use density::{evolve, pb_infinite, threshold, DeTrace};
pub use ensemble::{DegreeDistribution, EnsembleSpec, Poly};
pub use error::{Error, Result};
pub use real::{Hp, Real, Value};
pub use scaling::{
    alpha, alpha_limit, alpha_sweep, beta_regular, errorfloor_coefficient, gamma, AlphaResult,
    LimitOptions, LimitOutcome, LimitResult, PrecisionConfig, PrecisionMode, RecursionVariant,
    ScalingContext,
};
pub use sim::{
    approx_curve, bp_decode, compare, exact_small_ensemble, monte_carlo, sample_graph, SimResult,
    TannerGraph,
};
