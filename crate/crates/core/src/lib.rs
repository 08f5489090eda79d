//! Numerical laboratory for long-time decay of entropy solutions of
//! degenerate convection-diffusion equations `u_t + φ(u)_x = A(u)_xx` with
//! periodic plus vanishing initial data.

pub mod error;
pub mod field;
pub mod funcalg;
pub mod harness;
pub mod lattice;
pub mod model;
pub mod solver;
pub mod stefan;

pub use error::{Error, Result};
