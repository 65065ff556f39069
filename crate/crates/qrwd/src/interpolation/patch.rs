//! Curves, linear-interpolation patches and cells `dst ∘ src⁻¹`.


use serde::{Deserialize, Serialize};

use crate::numerics::{c, C64};

/// A parametrised curve on `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Curve {
    Segment { a: C64, b: C64 },
    /// `center + radius·e^{iθ}` with `θ` running linearly from `theta0` to `theta1`.
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
    /// `sign·2cosh(a + t(b - a))`.
    Cosh { a: C64, b: C64, sign: f64 },
}

impl Curve {
    pub fn segment(a: C64, b: C64) -> Self {
        Curve::Segment { a, b }
    }

    pub fn cosh(a: C64, b: C64) -> Self {
        Curve::Cosh { a, b, sign: 1.0 }
    }

    pub fn eval(&self, t: f64) -> C64 {
        match *self {
            Curve::Segment { a, b } => a + (b - a) * t,
            Curve::Arc { center, radius, theta0, theta1 } => {
                center + C64::from_polar(radius, theta0 + t * (theta1 - theta0))
            }
            Curve::Cosh { a, b, sign } => (a + (b - a) * t).cosh() * (2.0 * sign),
        }
    }

    pub fn deriv(&self, t: f64) -> C64 {
        match *self {
            Curve::Segment { a, b } => b - a,
            Curve::Arc { radius, theta0, theta1, .. } => {
                let th = theta0 + t * (theta1 - theta0);
                C64::new(0.0, theta1 - theta0) * C64::from_polar(radius, th)
            }
            Curve::Cosh { a, b, sign } => (a + (b - a) * t).sinh() * (b - a) * (2.0 * sign),
        }
    }

    /// `n + 1` equally spaced points.
    pub fn polyline(&self, n: usize) -> Vec<C64> {
        (0..=n).map(|k| self.eval(k as f64 / n as f64)).collect()
    }
}

/// Wirtinger derivatives of a map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirtinger {
    pub dz: C64,
    pub dzb: C64,
}

impl Wirtinger {
    pub fn holomorphic(dz: C64) -> Self {
        Wirtinger { dz, dzb: C64::new(0.0, 0.0) }
    }

    /// From the partial derivatives along the real and imaginary directions.
    pub fn from_partials(dx: C64, dy: C64) -> Self {
        let i = C64::new(0.0, 1.0);
        Wirtinger { dz: (dx - i * dy) * 0.5, dzb: (dx + i * dy) * 0.5 }
    }

    pub fn mu(&self) -> C64 {
        self.dzb / self.dz
    }

    pub fn jacobian(&self) -> f64 {
        self.dz.norm_sqr() - self.dzb.norm_sqr()
    }

    /// Derivatives of `outer ∘ inner⁻¹`, given both at the same source point.
    pub fn over(self, inner: Wirtinger) -> Wirtinger {
        let det = inner.jacobian();
        let dz = (self.dz * inner.dz.conj() - inner.dzb.conj() * self.dzb) / det;
        let dzb = (inner.dz * self.dzb - inner.dzb * self.dz) / det;
        Wirtinger { dz, dzb }
    }

    /// Chain rule for `outer ∘ self` where `outer` is evaluated at the image point.
    pub fn then(self, outer: Wirtinger) -> Wirtinger {
        Wirtinger {
            dz: outer.dz * self.dz + outer.dzb * self.dzb.conj(),
            dzb: outer.dz * self.dzb + outer.dzb * self.dz.conj(),
        }
    }

    pub fn conj_map(self) -> Wirtinger {
        // derivatives of conj(f)
        Wirtinger { dz: self.dzb.conj(), dzb: self.dz.conj() }
    }
}

/// `(1 - s)·γ1(t) + s·γ2(t)` on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub g1: Curve,
    pub g2: Curve,
}

/// Newton tolerance on the parameters.
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX: usize = 50;
/// Slack when deciding whether parameters lie in the unit square.
pub(crate) const PARAM_SLACK: f64 = 1e-9;

impl Patch {
    pub fn new(g1: Curve, g2: Curve) -> Self {
        Patch { g1, g2 }
    }

    pub fn eval(&self, s: f64, t: f64) -> C64 {
        self.g1.eval(t) * (1.0 - s) + self.g2.eval(t) * s
    }

    /// Partial derivatives `(∂_s, ∂_t)`.
    pub fn partials(&self, s: f64, t: f64) -> (C64, C64) {
        (self.g2.eval(t) - self.g1.eval(t), self.g1.deriv(t) * (1.0 - s) + self.g2.deriv(t) * s)
    }

    pub fn wirtinger(&self, s: f64, t: f64) -> Wirtinger {
        let (ps, pt) = self.partials(s, t);
        Wirtinger::from_partials(ps, pt)
    }

    /// Solves `eval(s, t) = z` by Newton from the centre of the square.
    pub fn invert(&self, z: C64) -> Option<(f64, f64)> {
        let (mut s, mut t) = (0.5, 0.5);
        for _ in 0..NEWTON_MAX {
            let f = self.eval(s, t) - z;
            let (ps, pt) = self.partials(s, t);
            let det = ps.re * pt.im - ps.im * pt.re;
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let ds = (f.re * pt.im - f.im * pt.re) / det;
            let dt = (ps.re * f.im - ps.im * f.re) / det;
            s = (s - ds).clamp(-0.5, 1.5);
            t = (t - dt).clamp(-0.5, 1.5);
            if ds.abs().max(dt.abs()) < NEWTON_TOL {
                return Some((s, t));
            }
        }
        None
    }

    pub fn corners(&self) -> [C64; 4] {
        [self.g1.eval(0.0), self.g2.eval(0.0), self.g2.eval(1.0), self.g1.eval(1.0)]
    }
}

pub(crate) fn in_unit_square(s: f64, t: f64) -> bool {
    (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&s) && (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&t)
}

/// One cell of a piecewise map: `dst ∘ src⁻¹` on `src(unit square)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub src: Patch,
    pub dst: Patch,
}

impl Cell {
    pub fn new(src: Patch, dst: Patch) -> Self {
        Cell { src, dst }
    }

    /// Parameters of `z` if it lies in this cell.
    pub fn locate(&self, z: C64) -> Option<(f64, f64)> {
        let (s, t) = self.src.invert(z)?;
        in_unit_square(s, t).then_some((s, t))
    }

    pub fn eval_at(&self, s: f64, t: f64) -> C64 {
        self.dst.eval(s, t)
    }

    pub fn wirtinger_at(&self, s: f64, t: f64) -> Wirtinger {
        self.dst.wirtinger(s, t).over(self.src.wirtinger(s, t))
    }

    /// Edges of the source cell as polylines, for seam bookkeeping.
    pub fn src_edges(&self, n: usize) -> Vec<Vec<C64>> {
        let p = self.src;
        let ends = |t: f64| -> Vec<C64> { (0..=n).map(|k| p.eval(k as f64 / n as f64, t)).collect() };
        vec![p.g1.polyline(n), p.g2.polyline(n), ends(0.0), ends(1.0)]
    }
}

/// First cell containing `z`, with its parameters.
pub(crate) fn locate_in(cells: &[Cell], z: C64) -> Option<(usize, f64, f64)> {
    cells.iter().enumerate().find_map(|(k, cell)| cell.locate(z).map(|(s, t)| (k, s, t)))
}

pub(crate) fn arc(center: C64, radius: f64, theta0: f64, theta1: f64) -> Curve {
    Curve::Arc { center, radius, theta0, theta1 }
}

pub(crate) fn ci(im: f64) -> C64 {
    c(0.0, im)
}
