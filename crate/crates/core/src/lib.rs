//! Stochastic generalized Lotka-Volterra (SGLV) modelling toolkit.
//!
//! The crate covers the whole workflow for multiplicative-noise GLV
//! dynamics `dx_k = x_k (r_k + Σ_l a_kl x_l) dt + σ_k x_k dB_k`:
//!
//! - [`simulator`]: log-space Euler-Maruyama paths observed on irregular
//!   schedules, plus an RK4 integrator for the deterministic model;
//! - [`inference`]: closed-form approximate maximum likelihood, Wald
//!   intervals from the information matrix, the deterministic least-squares
//!   baseline with bootstrap intervals, and one-step prediction;
//! - [`assumptions`]: checkers for the conditions that guarantee a positive,
//!   moment-bounded, ergodic solution;
//! - [`experiments`]: Monte Carlo MSE studies and cross-validated prediction;
//! - [`ingest`]: OTU count tables to proportion series;
//! - [`cli`]: the command implementations behind the `sglv` binary.
//!
//! All randomness flows through [`numerics::RngStream`], so every result is
//! reproducible from `(seed, stream_id)`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod assumptions;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod inference;
pub mod ingest;
pub mod model;
pub mod numerics;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{Drift, ModelParams, ObservationSeries};
