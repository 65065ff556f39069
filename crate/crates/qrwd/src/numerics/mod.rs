//! Scalar and geometric primitives shared by every other module.

mod logreal;
mod shapes;

pub use logreal::{LogReal, Tower, ADD_CUTOFF, DECODE_LIMIT};
pub use shapes::{Disc, EllipseRegion, Rectangle};

pub use num_complex::Complex64 as C64;

use std::f64::consts::PI;

use crate::error::{QrwdError, Result};

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn ensure_finite(z: C64, what: &str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(QrwdError::OutOfRange(format!("{what} produced non-finite {z}")))
    }
}

/// Poincaré distance in the upper half-plane.
pub fn hyperbolic_distance_h(z: C64, w: C64) -> Result<f64> {
    if !(z.im > 0.0 && w.im > 0.0) {
        return Err(QrwdError::Domain(format!(
            "hyperbolic distance needs Im > 0, got {z} and {w}"
        )));
    }
    let ratio = (z - w).norm() / (z - w.conj()).norm();
    Ok(2.0 * ratio.min(1.0).atanh())
}

/// Distance to the nearest lattice point of `2πi·ℤ`, i.e. the norm on ℂ/2πiℤ.
pub fn cylinder_norm(w: C64) -> f64 {
    let im = w.im - 2.0 * PI * (w.im / (2.0 * PI)).round();
    w.re.hypot(im)
}

/// `(z - i)/(z + i)`, sending the upper half-plane to the unit disc.
pub fn mobius_m(z: C64) -> Result<C64> {
    let den = z + I;
    if den == C64::new(0.0, 0.0) {
        return Err(QrwdError::Domain("mobius pole at -i".into()));
    }
    Ok((z - I) / den)
}

/// Inverse of [`mobius_m`].
pub fn mobius_m_inv(u: C64) -> Result<C64> {
    let den = C64::new(1.0, 0.0) - u;
    if den.norm() == 0.0 {
        return Err(QrwdError::Domain("inverse mobius pole at 1".into()));
    }
    Ok(I * (C64::new(1.0, 0.0) + u) / den)
}
