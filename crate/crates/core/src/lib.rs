//! Link-level simulation and analytic models for energy-aware error control
//! over cooperative wireless links.
//!
//! The crate combines four layers:
//!
//! * [`channel`] / [`modem`]: Rayleigh-faded link model, square M-QAM
//!   mapping and the closed-form symbol error rate of a faded link.
//! * [`codecs`]: bit-exact CRC-4, Hamming(7,4) and hard-decision
//!   Reed-Solomon over GF(2^m).
//! * [`cooperation`] / [`error_control`]: frame transport across direct,
//!   single-relay and dual-relay topologies, plus stop-and-wait ARQ and
//!   hybrid ARQ (type 1 and type 2) sessions.
//! * [`energy`] / [`montecarlo`]: per-packet power/energy/efficiency
//!   expressions and a deterministic, embarrassingly parallel experiment
//!   engine that aggregates BER/SER/PER/throughput/delay/energy metrics.
//!
//! All randomness flows through explicitly seeded counter-derived streams
//! (see [`rng`]), so every result is reproducible bit-for-bit regardless of
//! worker count.

// Validation tests are written as negated comparisons (`!(x > 0.0)`) so NaN
// inputs fall into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod codecs;
pub mod cooperation;
pub mod energy;
pub mod error;
pub mod error_control;
pub mod modem;
pub mod montecarlo;
pub mod rng;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
