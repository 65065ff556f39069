//! Interpolation pieces: the linear interpolation builder, the cosh-power
//! map `G`, the shift map `rho_w`, and a finite-difference dilatation
//! estimator that works on any [`QrPiece`].

pub mod cosh_power;
pub mod dilatation;
pub mod linear;
pub mod patch;
pub mod piece;
pub mod shift;

pub use cosh_power::{build_g, build_phi1, build_phi2, build_phi3, disc_radius, matching_defect, CoshPowerMap, Phi1, Phi2, Phi3, QuadrantMap};
pub use dilatation::{estimate_dilatation, mu_estimate, DilatationReport};
pub use linear::{build_linear_interp, theorem_constants, CurvePair, InterpolationMap};
pub use patch::{Cell, Curve, Patch, Wirtinger};
pub use piece::{FnPiece, QrPiece, Region};
pub use shift::{build_rho, ShiftMap};
