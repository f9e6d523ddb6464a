//! Reduced-order finite-element model of bladed-disk rotors with blade
//! cracks, blade loss and foreign-object impacts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod elements;
pub mod error;
pub mod loads;
pub mod quadrature;
pub mod scenario;
pub mod sections;
pub mod signals;
pub mod spin;
pub mod solver;

pub use error::{Error, Result};
pub use scenario::Scenario;
