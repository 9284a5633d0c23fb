//! Axisymmetric vortex rings at large radius against the planar point-vortex
//! model.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod point_vortex;
pub mod registry;
pub mod ring_sim;
pub mod vec2;

pub use error::{Error, Result};
pub use vec2::PlanarVec;
