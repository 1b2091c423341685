//! Vortex and twisted Skyrmion-string configurations of the O(3) sigma model.
//!
//! - [`field`]: the ansatz, its tangent frame and Cartesian derivatives.
//! - [`profile`]: radial profiles, closed form and shot.
//! - [`charges`]: topological charge, field strength, gauge potential, Hopf charge.
//! - [`energy`]: energy density, energy per length, Derrick scaling.
//! - [`cli`]: the `skyrmion-string` command-line tool.

// `!(x > 0.0)` is the NaN-rejecting guard used throughout; index loops mirror the tensor notation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod charges;
pub mod cli;
pub mod energy;
pub mod error;
pub mod field;
pub mod numeric;
pub mod profile;

pub use error::{Error, ErrorKind, Result};
