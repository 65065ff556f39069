//! Numerical workbench for entire functions with oscillating wandering
//! domains built from `2cosh z` by quasiregular surgery.
//!
//! The crate is organised bottom-up: [`numerics`] supplies scalars and
//! metrics, [`base_map`] the model map and its schedule, [`interpolation`]
//! the pieces `G` and `rho_w`, [`qr_map`] the assembled quasiregular map,
//! [`beltrami`] the grid solver, [`estimates`] the integral bounds,
//! [`dynamics`] the shooting solver and [`io`] configuration and artifacts.

pub mod error;
pub mod estimates;
pub mod base_map;
pub mod beltrami;
pub mod dynamics;
pub mod interpolation;
pub mod io;
pub mod numerics;
pub mod qr_map;

pub use error::{QrwdError, Result};
