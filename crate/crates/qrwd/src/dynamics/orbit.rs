//! Orbits and escape-time fields of arbitrary maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base_map::{OrbitClass, OrbitRecord};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Rectangle, C64};

/// Pixel value when the cap is reached without escape.
pub const ESCAPE_INTERIOR: u32 = u32::MAX;
/// Pixel value when the map could not be evaluated along the orbit.
pub const ESCAPE_FAILED: u32 = u32::MAX - 1;

/// Points closer than this to an earlier orbit point count as a cycle.
const CYCLE_TOL: f64 = 1e-12;
const CYCLE_LOOKBACK: usize = 64;

/// Iterates until `|z| > bailout` (escaping), a cycle is detected (bounded),
/// or the cap or an evaluation failure is hit (undecided, failures flagged).
/// An overflow counts as escaping at that step; the overflowing value is not stored.
pub fn iterate_orbit<F>(f: F, z0: C64, max_iter: usize, bailout: f64) -> Result<OrbitRecord>
where
    F: Fn(C64) -> Result<C64>,
{
    if !(bailout > 0.0) {
        return Err(QrwdError::OutOfRange(format!("bailout must be positive, got {bailout}")));
    }
    let mut points = vec![z0];
    let mut z = z0;
    if z.norm() > bailout {
        return Ok(OrbitRecord { points, classification: OrbitClass::Escaping, escape_index: Some(0), flag: None });
    }
    for k in 1..=max_iter {
        z = match f(z) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => v,
            // past the float range, so past any bailout
            Ok(v) if !v.re.is_nan() && !v.im.is_nan() => {
                return Ok(OrbitRecord { points, classification: OrbitClass::Escaping, escape_index: Some(k), flag: Some(format!("overflow to {v}")) })
            }
            Err(QrwdError::Overflow(msg)) => {
                return Ok(OrbitRecord { points, classification: OrbitClass::Escaping, escape_index: Some(k), flag: Some(msg) })
            }
            Ok(v) => {
                return Ok(OrbitRecord { points, classification: OrbitClass::Undecided, escape_index: None, flag: Some(format!("non-finite value {v}")) })
            }
            Err(e) => return Ok(OrbitRecord { points, classification: OrbitClass::Undecided, escape_index: None, flag: Some(e.to_string()) }),
        };
        let lo = points.len().saturating_sub(CYCLE_LOOKBACK);
        let cycle = points[lo..].iter().any(|p| (p - z).norm() <= CYCLE_TOL * z.norm().max(1.0));
        points.push(z);
        if z.norm() > bailout {
            return Ok(OrbitRecord { points, classification: OrbitClass::Escaping, escape_index: Some(k), flag: None });
        }
        if cycle {
            return Ok(OrbitRecord { points, classification: OrbitClass::Bounded, escape_index: None, flag: None });
        }
    }
    Ok(OrbitRecord { points, classification: OrbitClass::Undecided, escape_index: None, flag: None })
}

/// Per-pixel first escape iteration, rows from top to bottom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeField {
    pub window: Rectangle,
    pub width: usize,
    pub height: usize,
    pub max_iter: u32,
    pub bailout: f64,
    /// Escape counts, or [`ESCAPE_INTERIOR`] / [`ESCAPE_FAILED`].
    pub counts: Vec<u32>,
}

impl EscapeField {
    pub fn pixel_center(window: &Rectangle, width: usize, height: usize, i: usize, j: usize) -> C64 {
        let x = window.center.re - window.half_width + 2.0 * window.half_width * (i as f64 + 0.5) / width as f64;
        let y = window.center.im + window.half_height - 2.0 * window.half_height * (j as f64 + 0.5) / height as f64;
        c(x, y)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[j * self.width + i]
    }
}

pub fn escape_time_field<F>(f: F, window: Rectangle, width: usize, height: usize, max_iter: u32, bailout: f64) -> Result<EscapeField>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    if width == 0 || height == 0 {
        return Err(QrwdError::OutOfRange("field needs a positive resolution".into()));
    }
    if !(bailout > 0.0) {
        return Err(QrwdError::OutOfRange(format!("bailout must be positive, got {bailout}")));
    }
    let counts = (0..height)
        .into_par_iter()
        .flat_map_iter(|j| {
            let f = &f;
            (0..width).map(move |i| {
                let mut z = EscapeField::pixel_center(&window, width, height, i, j);
                for k in 0..=max_iter {
                    if !(z.norm() <= bailout) {
                        return k;
                    }
                    if k == max_iter {
                        break;
                    }
                    z = match f(z) {
                        Ok(v) if !v.re.is_nan() && !v.im.is_nan() => v,
                        Err(QrwdError::Overflow(_)) => return k + 1,
                        _ => return ESCAPE_FAILED,
                    };
                }
                ESCAPE_INTERIOR
            })
        })
        .collect();
    Ok(EscapeField { window, width, height, max_iter, bailout, counts })
}
