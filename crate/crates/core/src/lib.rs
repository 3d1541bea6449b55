#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Rigorous closed-form upper bounds for the tail of the maximum of a random
//! walk with negative drift, together with the exact and Monte Carlo oracles
//! used to check them.
//!
//! The walk is `S_0 = 0, S_n = X_1 + ... + X_n` with i.i.d. increments of
//! drift `-a < 0`. Bounds are available for the maximum `M_τ` over one
//! regenerative cycle (up to the first passage `τ_z` below `-z`), and for the
//! global maximum `M` via the summation `P(M > x) <= Σ_j P(M_τ > x + j z)`.
//!
//! Modules:
//! - [`distributions`]: increment laws, moments, truncated moments, tails.
//! - [`bounds`]: rates, cycle bounds, overshoot and `E[τ_z]` bounds, global bounds.
//! - [`montecarlo`]: regenerative simulation and the exact lattice oracle.
//! - [`heavytraffic`]: drift families `X^(a) = X^(0) - a` and ratio tables.
//! - [`cli`]: the command-line front end (also used by the `driftbound` binary).

pub mod bounds;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod heavytraffic;
pub mod montecarlo;
pub mod quad;
pub mod verify;

pub use distributions::{DistributionSpec, MomentProfile, TruncatedMoments, Variance};
pub use error::{Check, Error, Result};
