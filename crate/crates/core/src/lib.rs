//! Cycle-type sumsets, invariable generation of transitive subgroups of S_n,
//! the Poisson cycle model, and a Monte Carlo test for full Galois group.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod galois;
pub mod harness;
pub mod invariable;
pub mod perm_model;
pub mod poisson_lab;
pub mod primes;
pub mod rng;
pub mod stats;
pub mod sumset;

pub use error::{Error, Result};
