//! Monochromatic-box colorings of the plane and of R^n, with the algebra
//! and numerics needed to check them.

pub mod boundary;
pub mod box_invariant;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod nd_coloring;
pub mod net;
pub mod permanent;
pub mod plane;
pub mod rng;
pub mod scalar;
pub mod separation;

pub use error::{Error, Result};
