//! Exact multivalued solutions of one-dimensional homentropic gas flow for
//! the ideal and van der Waals gases: thermodynamics, phase coexistence,
//! the implicit solution surface, caustics, shock fronts and the
//! phase-transition curve in the `(t, x)` plane.

// `!(a < b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod homentropic;
pub mod numerics;
pub mod output;
pub mod phase;
pub mod singularity;
pub mod solution;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};
