//! Sensing-time and training-round allocation for edge learning systems.
//!
//! A fleet of devices first senses the environment to collect samples, then
//! runs a number of gradient rounds in which every device computes on its
//! local data and uploads an update. Sensing more data tightens the
//! convergence bound per round but eats into the time and energy left for
//! rounds. This crate models those costs, optimizes the split, and ships a
//! small gradient-descent simulator that checks the bound empirically.
//!
//! Modules:
//! - [`cost_model`]: per-device sensing, computation and radio costs.
//! - [`surrogate`]: contraction factor, convergence bound and the log objective.
//! - [`lp`]: a dense two-phase simplex solver.
//! - [`homogeneous`]: one-dimensional search for identical devices.
//! - [`heterogeneous`]: alternating optimization for mixed fleets.
//! - [`baselines`]: EAS, GSS, PSS and URS comparison allocators.
//! - [`sim`]: partial-data gradient descent on ridge regression problems.

pub mod baselines;
pub mod cost_model;
mod error;
pub mod heterogeneous;
pub mod homogeneous;
pub mod lp;
pub mod sim;
pub mod surrogate;

pub use error::{Error, Result};
