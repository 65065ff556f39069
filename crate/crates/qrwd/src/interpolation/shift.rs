//! The shift map `rho_w` of the closed unit disc: translation by `w` on the
//! disc of radius 1/8, identity on the unit circle.
//!
//! In between, each ray is interpolated linearly in the radius between the
//! shifted small circle and the unit circle, so `rho_w(z) = z + (8/7)(1 - |z|)w`.
//! This is the only subdivision of the annulus that keeps `rho_0` equal to
//! the identity; its dilatation is at most `(4/7)|w| / (1 - (4/7)|w|)`.

use super::patch::{arc, Wirtinger};
use super::piece::{QrPiece, Region};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Disc, C64};

pub const INNER_RADIUS: f64 = 0.125;
pub const MAX_SHIFT: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftMap {
    pub w: C64,
}

pub fn build_rho(w: C64) -> Result<ShiftMap> {
    if !(w.norm() < MAX_SHIFT) {
        return Err(QrwdError::OutOfRange(format!("shift |w| = {} must be below 3/4", w.norm())));
    }
    Ok(ShiftMap { w })
}

impl ShiftMap {
    fn weight(r: f64) -> f64 {
        (8.0 / 7.0) * (1.0 - r)
    }

    pub fn eval_jet(&self, z: C64) -> Result<(C64, Wirtinger, u32)> {
        let r = z.norm();
        if r > 1.0 + 1e-12 {
            return Err(QrwdError::Domain(format!("{z} lies outside the unit disc")));
        }
        if r <= INNER_RADIUS {
            return Ok((z + self.w, Wirtinger::holomorphic(c(1.0, 0.0)), 0));
        }
        let k = self.w * (4.0 / 7.0 / r);
        let jet = Wirtinger { dz: c(1.0, 0.0) - k * z.conj(), dzb: -k * z };
        Ok((z + self.w * Self::weight(r.min(1.0)), jet, 1))
    }

    /// Dilatation bound of the annulus part.
    pub fn mu_bound(&self) -> f64 {
        let a = 4.0 / 7.0 * self.w.norm();
        a / (1.0 - a)
    }
}

impl QrPiece for ShiftMap {
    fn name(&self) -> String {
        "rho".into()
    }
    fn domain(&self) -> Region {
        Region::Disc(Disc { center: c(0.0, 0.0), radius: 1.0 })
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        self.eval_jet(z).map(|(v, _, b)| (v, b))
    }
    fn seams(&self) -> Vec<Vec<C64>> {
        vec![arc(c(0.0, 0.0), INNER_RADIUS, 0.0, std::f64::consts::TAU).polyline(512)]
    }
    fn declared_bound(&self) -> f64 {
        let m = self.mu_bound();
        (1.0 + m) / (1.0 - m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_and_centre_rules() {
        let rho = build_rho(c(0.3, -0.4)).unwrap();
        assert_eq!(rho.eval(c(0.0, 0.0)).unwrap(), c(0.3, -0.4));
        for k in 0..16 {
            let z = C64::from_polar(1.0, k as f64 * 0.4);
            assert!((rho.eval(z).unwrap() - z).norm() < 1e-15);
        }
        let id = build_rho(c(0.0, 0.0)).unwrap();
        let z = c(0.31, 0.52);
        assert_eq!(id.eval(z).unwrap(), z);
        assert!(build_rho(c(0.75, 0.0)).is_err());
        assert!(rho.eval(c(1.1, 0.0)).is_err());
    }

    #[test]
    fn jet_and_conjugate_symmetry() {
        let w = c(0.2, 0.45);
        let rho = build_rho(w).unwrap();
        let rho_bar = build_rho(w.conj()).unwrap();
        for z in [c(0.5, 0.1), c(-0.3, 0.7), c(0.0, -0.2)] {
            assert!((rho_bar.eval(z.conj()).unwrap() - rho.eval(z).unwrap().conj()).norm() < 1e-15);
            let (_, jet, _) = rho.eval_jet(z).unwrap();
            let h = 1e-6;
            let fx = (rho.eval(z + h).unwrap() - rho.eval(z - h).unwrap()) / (2.0 * h);
            let fy = (rho.eval(z + c(0.0, h)).unwrap() - rho.eval(z - c(0.0, h)).unwrap()) / (2.0 * h);
            let fd = Wirtinger::from_partials(fx, fy);
            assert!((fd.dz - jet.dz).norm() < 1e-8 && (fd.dzb - jet.dzb).norm() < 1e-8);
            assert!(jet.mu().norm() <= rho.mu_bound() + 1e-15);
        }
    }
}
