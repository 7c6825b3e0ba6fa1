//! Black-box pseudo-boolean optimization with statistical linkage learning.
//!
//! The crate provides benchmark problems (deceptive and bimodal trap
//! concatenations, NK-landscapes, Ising spin glasses, MAX3SAT), a
//! deterministic noise wrapper that hides the dependency structure of a
//! problem, direct dependency checks, mutual-information dependency
//! structure matrices, linkage trees, and the PX-like linkage tree used by
//! PX-like optimal mixing. P3 and LT-GOMEA assemblies, a brute-force oracle
//! and an experiment harness sit on top.
//!
//! Variable indices are zero-based everywhere.

pub mod dependency;
pub mod error;
pub mod eval;
pub mod harness;
pub mod mixing;
pub mod noise;
pub mod optimizers;
pub mod oracle;
pub mod problems;
pub mod pxlt;
pub mod rng;
pub mod sll;
pub mod solution;

pub use dependency::Vig;
pub use error::{Error, Result};
pub use eval::{EvalBudget, Evaluator, Halt, Objective};
pub use problems::ProblemInstance;
pub use pxlt::Mask;
pub use rng::RngStream;
pub use sll::{Dsm, LinkageTree};
pub use solution::{unitation, Solution};

/// Tolerance used for every fitness comparison.
pub const FITNESS_EPS: f64 = 1e-9;
