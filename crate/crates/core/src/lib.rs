//! Constant angle surfaces in H²×R.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod curve;
pub mod diffgeo;
pub mod error;
pub mod exec;
pub mod mesh;
pub mod minkowski;
pub mod ode;
pub mod stencil;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
