//! Simulation and numerical verification of the β(3/2,1/2)-coalescent built
//! from pruning random binary trees.
//!
//! The crate is organized around five pieces:
//!
//! * [`specfun`]: exact rates, counting constants, generating functions,
//!   quadrature oracles and coefficient extraction.
//! * [`treecore`]: ordered binary trees with labelled leaves, uniform
//!   sampling, exhaustive enumeration and pruning surgery.
//! * [`prunesim`]: the discrete pruning chain and its statistics.
//! * [`lambdasim`]: a generic Λ-coalescent jump chain driven only by rates.
//! * [`crtsim`]: reduced trees of the Brownian continuum random tree, the
//!   Poisson mark process on them, dust masses and the Θ functional.
//!
//! [`harness`] ties these together into seeded, replicate-parallel
//! experiments that emit machine-readable reports.

pub mod crtsim;
pub mod error;
pub mod events;
pub mod harness;
pub mod lambdasim;
pub mod prunesim;
pub mod specfun;
pub mod treecore;

pub use error::{Error, Result};
