//! The normalised solution `φ` as a map of the whole plane.

use rayon::prelude::*;

use crate::beltrami::GridMap;
use crate::error::{QrwdError, Result};
use crate::numerics::{c, C64};

/// Newton iterations allowed when inverting.
const NEWTON_STEPS: usize = 40;

/// `φ` backed by a grid solution: exact cell summation for values, Newton
/// on the same for preimages, bilinear grid lookup for bulk work.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiMap {
    pub grid: GridMap,
}

impl PhiMap {
    pub fn new(grid: GridMap) -> Self {
        PhiMap { grid }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.grid.eval_exact(z)
    }

    /// Bilinear on the grid, exact outside it.
    pub fn eval_fast(&self, z: C64) -> C64 {
        self.grid.eval(z).unwrap_or_else(|_| self.eval(z))
    }

    pub fn eval_many(&self, zs: &[C64]) -> Vec<C64> {
        zs.par_iter().map(|&z| self.eval(z)).collect()
    }

    /// Complex derivative by central differences; meaningful where `φ` is conformal.
    pub fn derivative(&self, z: C64) -> C64 {
        let h = 1e-4 * z.norm().max(1.0);
        (self.eval(z + h) - self.eval(z - h)) / (2.0 * h)
    }

    /// `φ(z) ≈ (z - a0)/(a1 - a0)` away from the support.
    fn affine_guess(&self, w: C64) -> C64 {
        let (a0, a1) = self.grid.anchors;
        w * (a1 - a0) + a0
    }

    /// Preimage of `w`, polished by Newton with a finite-difference real Jacobian.
    pub fn invert(&self, w: C64) -> Result<C64> {
        let mut z = self.grid.invert(w).unwrap_or_else(|_| self.affine_guess(w));
        let tol = 1e-12 * w.norm().max(1.0);
        for _ in 0..NEWTON_STEPS {
            let f = self.eval(z) - w;
            if f.norm() <= tol {
                return Ok(z);
            }
            let h = 1e-6 * z.norm().max(1.0);
            let fx = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h);
            let fy = (self.eval(z + c(0.0, h)) - self.eval(z - c(0.0, h))) / (2.0 * h);
            let det = fx.re * fy.im - fx.im * fy.re;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dx = (f.re * fy.im - f.im * fy.re) / det;
            let dy = (fx.re * f.im - fx.im * f.re) / det;
            z -= c(dx, dy);
        }
        if (self.eval(z) - w).norm() <= 1e3 * tol {
            return Ok(z);
        }
        Err(QrwdError::Constructive(format!("phi inverse did not converge at {w}")))
    }

    /// Grid preimage without polishing; falls back to [`PhiMap::invert`] off the grid image.
    pub fn invert_fast(&self, w: C64) -> Result<C64> {
        self.grid.invert(w).or_else(|_| self.invert(w))
    }
}
