//! Numerical laboratory for explicit half-space Stokes kernels with a boundary-singular force.
//!
//! The crate evaluates heat and Newtonian kernels, the half-space Green tensor, the singular
//! force, the separable pieces of the velocity and pressure, and fits the boundary blow-up
//! rates that these pieces exhibit.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod quad;

pub use error::{Error, Result};
pub use model::{HalfSpacePoint, ModelParams, SpaceTimePoint};
pub mod analysis;
pub mod fields;
pub mod force;
pub mod greens;
pub mod kernels;
pub mod regions;
pub mod shearflow;
