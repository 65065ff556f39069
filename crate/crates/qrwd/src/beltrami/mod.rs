//! Grid solver for the Beltrami equation: sample a compactly supported
//! coefficient, solve for the normalised quasiconformal map by a Neumann
//! series in the Beurling transform, invert the grid map and compose.

pub mod container;
mod far_field;
pub mod kernels;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QrwdError, Result};
use crate::interpolation::{mu_estimate, QrPiece, Region};
use crate::numerics::{c, Rectangle, C64};
use far_field::CellSum;
use kernels::Convolver;

pub const K_MAX: f64 = 0.95;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_TERMS: usize = 200;
pub const MIN_RESOLUTION: usize = 128;

/// Node layout shared by fields and maps: `nx × ny` nodes spanning the closed box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub bbox: Rectangle,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(bbox: Rectangle, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(QrwdError::Invalid(format!("grid needs at least 2 nodes per axis, got {nx} x {ny}")));
        }
        Ok(Grid { bbox, nx, ny })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.bbox.half_width / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.bbox.half_height / (self.ny - 1) as f64
    }

    pub fn origin(&self) -> C64 {
        self.bbox.center - c(self.bbox.half_width, self.bbox.half_height)
    }

    pub fn node(&self, i: usize, j: usize) -> C64 {
        self.origin() + c(i as f64 * self.dx(), j as f64 * self.dy())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> Vec<C64> {
        (0..self.ny).flat_map(|j| (0..self.nx).map(move |i| (i, j))).map(|(i, j)| self.node(i, j)).collect()
    }

    /// Fractional grid coordinates of `z`.
    fn coords(&self, z: C64) -> (f64, f64) {
        let o = z - self.origin();
        (o.re / self.dx(), o.im / self.dy())
    }
}

/// Sampled Beltrami coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeltramiField {
    pub grid: Grid,
    pub samples: Vec<C64>,
    pub k_max: f64,
}

impl BeltramiField {
    /// Samples `mu` at the nodes inside `mask`; other nodes get zero.
    pub fn from_fn<M, F>(grid: Grid, mask: M, mu: F) -> Result<Self>
    where
        M: Fn(C64) -> bool + Sync,
        F: Fn(C64) -> Result<C64> + Sync,
    {
        let samples: Result<Vec<C64>> = grid
            .nodes()
            .into_par_iter()
            .map(|z| if mask(z) { mu(z) } else { Ok(c(0.0, 0.0)) })
            .collect();
        Self::from_samples(grid, samples?)
    }

    pub fn from_samples(grid: Grid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(QrwdError::Invalid(format!("expected {} samples, got {}", grid.len(), samples.len())));
        }
        let mut k_max = 0.0f64;
        for (idx, m) in samples.iter().enumerate() {
            if !m.norm().is_finite() {
                return Err(QrwdError::Invalid(format!("non-finite sample at node {idx}")));
            }
            if m.norm() >= K_MAX {
                let z = grid.node(idx % grid.nx, idx / grid.nx);
                return Err(QrwdError::DilatationTooLarge(m.norm()).with_location(z));
            }
            k_max = k_max.max(m.norm());
        }
        Ok(BeltramiField { grid, samples, k_max })
    }

    pub fn zero(grid: Grid) -> Self {
        BeltramiField { samples: vec![c(0.0, 0.0); grid.len()], grid, k_max: 0.0 }
    }
}

impl QrwdError {
    /// Adds the offending location to a dilatation error.
    fn with_location(self, z: C64) -> QrwdError {
        match self {
            QrwdError::DilatationTooLarge(m) => QrwdError::Invalid(format!("|mu| = {m} >= {K_MAX} at {z}")),
            other => other,
        }
    }
}

/// Samples `μ̂` of a piece by finite differences (step a quarter of the finer grid spacing)
/// at nodes inside `support`, zero elsewhere.
pub fn sample_mu<M>(piece: &dyn QrPiece, support: M, grid: Grid) -> Result<BeltramiField>
where
    M: Fn(C64) -> bool + Sync,
{
    if grid.nx < MIN_RESOLUTION || grid.ny < MIN_RESOLUTION {
        return Err(QrwdError::Precondition(format!("resolution must be >= {MIN_RESOLUTION} per axis")));
    }
    let step = grid.dx().min(grid.dy()) / 8.0;
    let sampler = |z: C64| -> Result<C64> {
        // on a seam the strict stencil fails at every step; fall back to a plain one
        for h in [step, step / 8.0, step / 64.0] {
            if let Some(mu) = mu_estimate(piece, z, h, true)? {
                return Ok(mu);
            }
        }
        Ok(mu_estimate(piece, z, step / 64.0, false)?.unwrap_or(c(0.0, 0.0)))
    };
    BeltramiField::from_fn(grid, |z| support(z) && piece.contains(z), sampler)
}

/// Solution of the Beltrami equation on a grid, normalised so that `0 ↦ 0` and `1 ↦ 1`.
#[derive(Debug, Serialize, Deserialize)]
pub struct GridMap {
    pub grid: Grid,
    /// Normalised images of the nodes.
    pub values: Vec<C64>,
    /// Raw images of 0 and 1 before normalisation.
    pub anchors: (C64, C64),
    /// Density `∂_z̄ φ` on the nodes (before normalisation).
    pub h: Vec<C64>,
    /// Sup-norm change of `h` per iteration.
    pub residuals: Vec<f64>,
    #[serde(skip)]
    index: OnceLock<ImageIndex>,
    #[serde(skip)]
    sums: OnceLock<CellSum>,
}

impl Clone for GridMap {
    fn clone(&self) -> Self {
        GridMap::from_parts(self.grid, self.values.clone(), self.anchors, self.h.clone(), self.residuals.clone())
    }
}

impl PartialEq for GridMap {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values && self.anchors == other.anchors && self.h == other.h
    }
}

/// Solves `h = μ + μ S[h]` by iteration and returns `φ = z + P[h]`, normalised.
pub fn solve_mrmt(field: &BeltramiField, tol: f64, max_terms: usize) -> Result<GridMap> {
    if field.k_max >= K_MAX {
        return Err(QrwdError::DilatationTooLarge(field.k_max));
    }
    let grid = field.grid;
    let conv = Convolver::new(grid.nx, grid.ny, grid.dx(), grid.dy());
    let mu = &field.samples;
    let mut h = mu.clone();
    let mut residuals = Vec::new();
    let zero = c(0.0, 0.0);
    if field.k_max > 0.0 {
        let mut converged = false;
        for _ in 0..max_terms {
            let sh = conv.beurling(&h);
            let next: Vec<C64> = mu.par_iter().zip(sh.par_iter()).map(|(&m, &s)| if m == zero { zero } else { m + m * s }).collect();
            let diff = next.par_iter().zip(h.par_iter()).map(|(a, b)| (a - b).norm()).reduce(|| 0.0, f64::max);
            h = next;
            residuals.push(diff);
            if diff < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QrwdError::Constructive(format!(
                "Neumann series did not converge in {max_terms} terms; last residual {:e}",
                residuals.last().copied().unwrap_or(f64::NAN)
            )));
        }
    }
    let p = conv.cauchy(&h);
    let raw: Vec<C64> = grid.nodes().iter().zip(&p).map(|(z, v)| z + v).collect();
    let sums = CellSum::new(&grid, &h);
    let a0 = raw_eval(&sums, c(0.0, 0.0));
    let a1 = raw_eval(&sums, c(1.0, 0.0));
    let scale = a1 - a0;
    if scale.norm() == 0.0 {
        return Err(QrwdError::Constructive("degenerate normalisation: phi(0) = phi(1)".into()));
    }
    let values = raw.iter().map(|v| (v - a0) / scale).collect();
    Ok(GridMap::from_parts(grid, values, (a0, a1), h, residuals))
}

/// `z + P[h](z)` at an arbitrary point.
fn raw_eval(sums: &CellSum, z: C64) -> C64 {
    z + sums.eval(z) / std::f64::consts::PI
}

/// Buckets of image cells for point location.
#[derive(Debug)]
struct ImageIndex {
    lo: C64,
    cell: C64,
    bx: usize,
    by: usize,
    buckets: Vec<Vec<u32>>,
}

impl GridMap {
    pub fn from_parts(grid: Grid, values: Vec<C64>, anchors: (C64, C64), h: Vec<C64>, residuals: Vec<f64>) -> Self {
        GridMap { grid, values, anchors, h, residuals, index: OnceLock::new(), sums: OnceLock::new() }
    }

    /// The identity on a grid.
    pub fn identity(grid: Grid) -> Self {
        let values = grid.nodes();
        GridMap::from_parts(grid, values, (c(0.0, 0.0), c(1.0, 0.0)), vec![c(0.0, 0.0); grid.len()], Vec::new())
    }

    fn value(&self, i: usize, j: usize) -> C64 {
        self.values[j * self.grid.nx + i]
    }

    /// Bilinear interpolation of the node values; `z` must lie in the box.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !self.grid.bbox.contains_closed(z) {
            return Err(QrwdError::Domain(format!("{z} is outside the solver box")));
        }
        let (u, v) = self.grid.coords(z);
        let i = (u.floor() as usize).min(self.grid.nx - 2);
        let j = (v.floor() as usize).min(self.grid.ny - 2);
        Ok(self.bilinear(i, j, u - i as f64, v - j as f64))
    }

    /// Off-grid evaluation by direct summation; valid anywhere in the plane.
    pub fn eval_exact(&self, z: C64) -> C64 {
        let (a0, a1) = self.anchors;
        let sums = self.sums.get_or_init(|| CellSum::new(&self.grid, &self.h));
        (raw_eval(sums, z) - a0) / (a1 - a0)
    }

    fn bilinear(&self, i: usize, j: usize, s: f64, t: f64) -> C64 {
        let (p00, p10, p01, p11) = (self.value(i, j), self.value(i + 1, j), self.value(i, j + 1), self.value(i + 1, j + 1));
        p00 * ((1.0 - s) * (1.0 - t)) + p10 * (s * (1.0 - t)) + p01 * ((1.0 - s) * t) + p11 * (s * t)
    }

    /// Share of cells whose image has positive orientation.
    pub fn orientation_fraction(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let good: usize = (0..ny - 1)
            .into_par_iter()
            .map(|j| {
                (0..nx - 1)
                    .filter(|&i| {
                        let a = self.value(i + 1, j + 1) - self.value(i, j);
                        let b = self.value(i, j + 1) - self.value(i + 1, j);
                        (a.conj() * b).im > 0.0
                    })
                    .count()
            })
            .sum();
        good as f64 / ((nx - 1) * (ny - 1)) as f64
    }

    fn index(&self) -> &ImageIndex {
        self.index.get_or_init(|| {
            let (nx, ny) = (self.grid.nx, self.grid.ny);
            let mut lo = c(f64::MAX, f64::MAX);
            let mut hi = c(f64::MIN, f64::MIN);
            for v in &self.values {
                lo = c(lo.re.min(v.re), lo.im.min(v.im));
                hi = c(hi.re.max(v.re), hi.im.max(v.im));
            }
            let (bx, by) = (nx.max(1), ny.max(1));
            let cell = c((hi.re - lo.re).max(1e-300) / bx as f64, (hi.im - lo.im).max(1e-300) / by as f64);
            let mut buckets = vec![Vec::new(); bx * by];
            let bucket = |z: C64| -> (usize, usize) {
                let u = ((z.re - lo.re) / cell.re).floor().clamp(0.0, (bx - 1) as f64) as usize;
                let v = ((z.im - lo.im) / cell.im).floor().clamp(0.0, (by - 1) as f64) as usize;
                (u, v)
            };
            for j in 0..ny - 1 {
                for i in 0..nx - 1 {
                    let q = [self.value(i, j), self.value(i + 1, j), self.value(i, j + 1), self.value(i + 1, j + 1)];
                    let qlo = q.iter().fold(c(f64::MAX, f64::MAX), |a, z| c(a.re.min(z.re), a.im.min(z.im)));
                    let qhi = q.iter().fold(c(f64::MIN, f64::MIN), |a, z| c(a.re.max(z.re), a.im.max(z.im)));
                    let (u0, v0) = bucket(qlo);
                    let (u1, v1) = bucket(qhi);
                    for v in v0..=v1 {
                        for u in u0..=u1 {
                            buckets[v * bx + u].push((j * nx + i) as u32);
                        }
                    }
                }
            }
            ImageIndex { lo, cell, bx, by, buckets }
        })
    }

    /// Preimage of `target` under the bilinear interpolant.
    pub fn invert(&self, target: C64) -> Result<C64> {
        let idx = self.index();
        let u = ((target.re - idx.lo.re) / idx.cell.re).floor();
        let v = ((target.im - idx.lo.im) / idx.cell.im).floor();
        let outside = || QrwdError::Domain(format!("{target} is outside the image of the solver grid"));
        if !(u >= -1.0 && v >= -1.0 && u <= idx.bx as f64 && v <= idx.by as f64) {
            return Err(outside());
        }
        let u = (u.max(0.0) as usize).min(idx.bx - 1);
        let v = (v.max(0.0) as usize).min(idx.by - 1);
        let scale = self.grid.dx().max(self.grid.dy());
        for &cell in &idx.buckets[v * idx.bx + u] {
            let (i, j) = (cell as usize % self.grid.nx, cell as usize / self.grid.nx);
            if let Some((s, t)) = self.newton_cell(i, j, target, scale) {
                return Ok(self.grid.node(i, j) + c(s * self.grid.dx(), t * self.grid.dy()));
            }
        }
        Err(outside())
    }

    fn newton_cell(&self, i: usize, j: usize, target: C64, scale: f64) -> Option<(f64, f64)> {
        let (p00, p10, p01, p11) = (self.value(i, j), self.value(i + 1, j), self.value(i, j + 1), self.value(i + 1, j + 1));
        let (mut s, mut t) = (0.5, 0.5);
        let image_scale = (p11 - p00).norm().max((p10 - p01).norm()).max(1e-300);
        for _ in 0..30 {
            let f = self.bilinear(i, j, s, t) - target;
            let fs = (p10 - p00) * (1.0 - t) + (p11 - p01) * t;
            let ft = (p01 - p00) * (1.0 - s) + (p11 - p10) * s;
            let det = fs.re * ft.im - fs.im * ft.re;
            if det == 0.0 {
                return None;
            }
            let ds = (f.re * ft.im - f.im * ft.re) / det;
            let dt = (fs.re * f.im - fs.im * f.re) / det;
            s = (s - ds).clamp(-0.5, 1.5);
            t = (t - dt).clamp(-0.5, 1.5);
            if (ds.abs() + dt.abs()) * image_scale < 1e-12 * scale.max(1.0) {
                break;
            }
        }
        let slack = 1e-9;
        let inside = (-slack..=1.0 + slack).contains(&s) && (-slack..=1.0 + slack).contains(&t);
        let err = (self.bilinear(i, j, s, t) - target).norm();
        (inside && err <= 1e-10 * image_scale.max(1.0)).then_some((s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
    }
}

/// `f = g ∘ φ⁻¹` on the image of the solver box.
pub struct ComposedMap<'a> {
    pub g: &'a (dyn Fn(C64) -> Result<C64> + Sync),
    pub phi: &'a GridMap,
}

pub fn compose_fw<'a>(g: &'a (dyn Fn(C64) -> Result<C64> + Sync), phi: &'a GridMap) -> ComposedMap<'a> {
    ComposedMap { g, phi }
}

impl ComposedMap<'_> {
    pub fn eval(&self, z: C64) -> Result<C64> {
        (self.g)(self.phi.invert(z)?)
    }
}

impl QrPiece for ComposedMap<'_> {
    fn name(&self) -> String {
        "f".into()
    }
    fn domain(&self) -> Region {
        // the image of an inner box; callers restrict further as needed
        let b = self.phi.grid.bbox;
        let corners = [
            b.center + c(-b.half_width, -b.half_height) * 0.9,
            b.center + c(b.half_width, -b.half_height) * 0.9,
            b.center + c(b.half_width, b.half_height) * 0.9,
            b.center + c(-b.half_width, b.half_height) * 0.9,
        ];
        let v = corners.iter().filter_map(|&z| self.phi.eval(z).ok()).collect();
        Region::Polygon { vertices: v }
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        Ok((self.eval(z)?, 0))
    }
    fn declared_bound(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, half: f64) -> Grid {
        Grid::new(Rectangle::new(c(0.0, 0.0), half, half).unwrap(), n, n).unwrap()
    }

    #[test]
    fn zero_field_gives_identity() {
        let g = grid(129, 2.0);
        let phi = solve_mrmt(&BeltramiField::zero(g), DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        for (v, z) in phi.values.iter().zip(g.nodes()) {
            assert!((v - z).norm() < 1e-12);
        }
        assert_eq!(phi.invert(c(1.0, 0.5)).unwrap(), c(1.0, 0.5));
    }

    #[test]
    fn oversized_field_is_rejected() {
        let g = grid(128, 1.0);
        let err = BeltramiField::from_fn(g, |_| true, |_| Ok(c(0.96, 0.0))).unwrap_err();
        assert!(matches!(err, QrwdError::Invalid(_)));
    }

    #[test]
    fn disc_field_is_affine_inside() {
        // μ = k on the unit disc: φ = z + k conj z inside, z + k/z outside
        let k = 0.3;
        let g = grid(257, 2.0);
        let field = BeltramiField::from_fn(g, |z| z.norm() < 1.0, |_| Ok(c(k, 0.0))).unwrap();
        let phi = solve_mrmt(&field, 1e-10, 200).unwrap();
        assert!(phi.residuals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
        let raw = |z: C64| if z.norm() < 1.0 { z + z.conj() * k } else { z + k / z };
        let norm = |z: C64| (raw(z) - raw(c(0.0, 0.0))) / (raw(c(1.0, 0.0)) - raw(c(0.0, 0.0)));
        for z in [c(0.3, 0.2), c(-0.5, 0.1), c(1.5, -1.0)] {
            assert!((phi.eval(z).unwrap() - norm(z)).norm() < 0.02, "{z}");
        }
        assert!((phi.eval_exact(c(0.0, 0.0))).norm() < 1e-12);
        assert!((phi.eval_exact(c(1.0, 0.0)) - 1.0).norm() < 1e-12);
        assert!(phi.orientation_fraction() > 0.999);
        let t = c(0.4, -0.7);
        let back = phi.invert(t).unwrap();
        assert!((phi.eval(back).unwrap() - t).norm() < 1e-9);
    }
}
