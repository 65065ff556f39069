use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{QrwdError, Result};

/// Axis-aligned open rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub center: C64,
    pub half_width: f64,
    pub half_height: f64,
}

impl Rectangle {
    pub fn new(center: C64, half_width: f64, half_height: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_height > 0.0) {
            return Err(QrwdError::Invalid(format!(
                "rectangle half sides must be positive, got {half_width} x {half_height}"
            )));
        }
        Ok(Rectangle { center, half_width, half_height })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z.re - self.center.re).abs() < self.half_width
            && (z.im - self.center.im).abs() < self.half_height
    }

    pub fn contains_closed(&self, z: C64) -> bool {
        (z.re - self.center.re).abs() <= self.half_width
            && (z.im - self.center.im).abs() <= self.half_height
    }

    pub fn overlaps(&self, other: &Rectangle) -> bool {
        (self.center.re - other.center.re).abs() < self.half_width + other.half_width
            && (self.center.im - other.center.im).abs() < self.half_height + other.half_height
    }

    /// `n` points per side, counter-clockwise from the lower-left corner.
    pub fn boundary_samples(&self, n: usize) -> Vec<C64> {
        let (a, b) = (self.half_width, self.half_height);
        let corners = [
            self.center + C64::new(-a, -b),
            self.center + C64::new(a, -b),
            self.center + C64::new(a, b),
            self.center + C64::new(-a, b),
        ];
        let mut out = Vec::with_capacity(4 * n);
        for k in 0..4 {
            let (p, q) = (corners[k], corners[(k + 1) % 4]);
            for j in 0..n {
                out.push(p + (q - p) * (j as f64 / n as f64));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(QrwdError::Invalid(format!("disc radius must be positive, got {radius}")));
        }
        Ok(Disc { center, radius })
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn contains_closed(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn boundary_samples(&self, n: usize) -> Vec<C64> {
        (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                self.center + C64::from_polar(self.radius, t)
            })
            .collect()
    }
}

/// Ellipse centred at 0 with axes along ℝ and iℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseRegion {
    pub semi_major: f64,
    pub semi_minor: f64,
}

impl EllipseRegion {
    pub fn new(semi_major: f64, semi_minor: f64) -> Result<Self> {
        if !(semi_major >= semi_minor && semi_minor > 0.0) {
            return Err(QrwdError::Invalid(format!(
                "ellipse needs semi_major >= semi_minor > 0, got {semi_major}, {semi_minor}"
            )));
        }
        Ok(EllipseRegion { semi_major, semi_minor })
    }

    /// The ellipse bounded by `g(∂Q)` at real part `r`: axes `2cosh r`, `2sinh r`.
    pub fn cosh_level(r: f64) -> Result<Self> {
        // for r past ~19 sinh can round one ulp above cosh
        let major = 2.0 * r.cosh();
        Self::new(major, (2.0 * r.sinh()).min(major))
    }

    /// `(x/a)^2 + (y/b)^2 - 1`; zero on the boundary.
    pub fn residual(&self, z: C64) -> f64 {
        (z.re / self.semi_major).powi(2) + (z.im / self.semi_minor).powi(2) - 1.0
    }

    pub fn contains(&self, z: C64) -> bool {
        self.residual(z) < 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_degenerate() {
        assert!(Rectangle::new(C64::new(0.0, 0.0), 0.0, 1.0).is_err());
        assert!(Disc::new(C64::new(0.0, 0.0), -1.0).is_err());
        assert!(EllipseRegion::new(1.0, 2.0).is_err());
    }

    #[test]
    fn membership() {
        let r = Rectangle::new(C64::new(1.0, 0.0), 1.0, std::f64::consts::PI).unwrap();
        assert!(r.contains(C64::new(1.5, 3.0)));
        assert!(!r.contains(C64::new(2.0, 0.0)));
        assert!(r.contains_closed(C64::new(2.0, 0.0)));
        let e = EllipseRegion::cosh_level(1.0).unwrap();
        assert!(e.residual(C64::new(2.0 * 1f64.cosh(), 0.0)).abs() < 1e-15);
    }
}
