//! Contractive interference functions for distributed power control.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkit`]: weighted max norms, spectral radius, linear solves.
//! * [`ifun`]: the interference-function abstraction, axiom falsifiers,
//!   the log-coordinate transform and the `d_c` metric.
//! * [`zoo`]: concrete power-control laws built from a [`zoo::NetworkScenario`].
//! * [`certify`]: contraction certificates `(c, v)` and their refutations.
//! * [`engine`]: synchronous and simulated asynchronous iterations, rate
//!   estimation and envelope checks.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod engine;
pub mod ifun;
pub mod numkit;
pub mod zoo;

pub use numkit::{Mat, NumError};
