//! The common interface of the interpolation pieces.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{c, Disc, Rectangle, C64};

/// Where a piece is defined (closed set).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Rect(Rectangle),
    Disc(Disc),
    /// Simple polygon, vertices in order.
    Polygon { vertices: Vec<C64> },
}

impl Region {
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Rect(r) => r.contains_closed(z),
            Region::Disc(d) => d.contains_closed(z),
            Region::Polygon { vertices } => polygon_contains(vertices, z),
        }
    }

    pub fn bbox(&self) -> Rectangle {
        match self {
            Region::Rect(r) => *r,
            Region::Disc(d) => Rectangle { center: d.center, half_width: d.radius, half_height: d.radius },
            Region::Polygon { vertices } => {
                let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for v in vertices {
                    x0 = x0.min(v.re);
                    x1 = x1.max(v.re);
                    y0 = y0.min(v.im);
                    y1 = y1.max(v.im);
                }
                Rectangle { center: c((x0 + x1) / 2.0, (y0 + y1) / 2.0), half_width: (x1 - x0) / 2.0, half_height: (y1 - y0) / 2.0 }
            }
        }
    }
}

/// Even-odd rule; points on an edge count as inside.
fn polygon_contains(v: &[C64], z: C64) -> bool {
    let n = v.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (v[k], v[(k + 1) % n]);
        let ab = b - a;
        let az = z - a;
        let cross = ab.re * az.im - ab.im * az.re;
        let dot = ab.re * az.re + ab.im * az.im;
        if cross.abs() <= 1e-12 * ab.norm_sqr().max(1.0) && dot >= 0.0 && dot <= ab.norm_sqr() {
            return true;
        }
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * ab.re;
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// A map with a declared dilatation bound, defined on a closed region.
pub trait QrPiece: Send + Sync {
    fn name(&self) -> String;

    fn degree(&self) -> Option<u32> {
        None
    }

    fn domain(&self) -> Region;

    fn contains(&self, z: C64) -> bool {
        self.domain().contains(z)
    }

    /// Value plus an identifier of the smooth branch used; branches change only across seams.
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)>;

    fn eval(&self, z: C64) -> Result<C64> {
        self.eval_branch(z).map(|(w, _)| w)
    }

    /// Internal seams as polylines.
    fn seams(&self) -> Vec<Vec<C64>> {
        Vec::new()
    }

    /// Upper bound for the dilatation `K`.
    fn declared_bound(&self) -> f64;
}

/// A bare map for tests and examples.
pub struct FnPiece<F> {
    pub name: String,
    pub region: Region,
    pub f: F,
    pub bound: f64,
}

impl<F: Fn(C64) -> C64 + Send + Sync> QrPiece for FnPiece<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn domain(&self) -> Region {
        self.region.clone()
    }

    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        Ok(((self.f)(z), 0))
    }

    fn declared_bound(&self) -> f64 {
        self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_membership() {
        let sq = Region::Polygon { vertices: vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)] };
        assert!(sq.contains(c(0.5, 0.5)));
        assert!(sq.contains(c(1.0, 0.3)));
        assert!(!sq.contains(c(1.1, 0.3)));
        let b = sq.bbox();
        assert_eq!(b.center, c(0.5, 0.5));
    }
}
