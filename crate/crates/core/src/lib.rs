//! Viscous upwind finite-volume solver for the two-dimensional compressible
//! Euler equations, with Cesàro-average diagnostics over mesh hierarchies.

// `!(x > 0.0)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod eos;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod initdata;
pub mod measures;
pub mod rng;
pub mod scheme;
pub mod snapshot;

pub use eos::{Conserved, GasParams, Primitive};
pub use error::{Error, Result};
pub use grid::{Boundary, ConservativeField, Mesh};
pub use initdata::KhSpec;
pub use scheme::{PressureWork, SchemeParams};
