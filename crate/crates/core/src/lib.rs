//! Equilibrium points, linear stability, zero-velocity curves and critical-mass
//! scans for the photogravitational restricted three-body problem with an
//! oblate secondary and a power-law circumbinary disk.

// `!(x > 0.0)` style checks are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod roots;
pub mod stability;
pub mod zvc;

pub use error::{Error, Result};
pub use model::{Model, Position, State, SystemParams};
