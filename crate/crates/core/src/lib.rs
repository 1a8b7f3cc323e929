//! Simulation laboratory for the repeated newsvendor with censored demand.
//!
//! The crate provides Thompson Sampling with a Gamma prior on a Weibull demand
//! rate, three baseline policies (phased UCB, projected subgradient descent,
//! myopic Bayes), a Kaplan–Meier plug-in estimator, closed-form evaluators for
//! the constants of the regret analysis, and a seeded Monte Carlo harness that
//! produces regret curves.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod demand;
pub mod error;
pub mod km;
pub mod newsvendor;
pub mod policies;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
