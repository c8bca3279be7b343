//! Finite-dimensional laboratory for relational quantum dynamics.
//!
//! The crate builds covariant clock POVMs, constrained clock–system models
//! and the three equivalent descriptions of their dynamics: relational Dirac
//! observables on the physical Hilbert space, Page–Wootters conditional
//! states, and the symmetry-reduced Heisenberg picture. On top of that sit
//! temporal frame changes between two clocks and gauge-invariant conditional
//! probabilities.
//!
//! Every identity between the descriptions is exposed as a numerical defect,
//! and [`report::Report`] collects them with tolerances.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clock;
pub mod constraint;
pub mod error;
pub mod exec;
pub mod framechange;
pub mod linalg;
pub mod presets;
pub mod probability;
pub mod quadrature;
pub mod reductions;
pub mod relobs;
pub mod report;

pub use error::{Result, TrinityError};
