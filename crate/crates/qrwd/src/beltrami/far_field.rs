//! Point evaluation of `Σ_cells h ∬_cell dA / (z - w)`.
//!
//! Cells are grouped into square tiles. A tile far from `z` contributes
//! through a truncated Laurent series about its centre; nearby tiles are
//! summed cell by cell, with the closed-form cell integral close to `z` and
//! a three-term moment expansion further out.

use super::kernels::inv_u_integral;
use super::Grid;
use crate::numerics::{c, C64};

const TILE: usize = 16;
const TERMS: usize = 32;
/// A tile is far once `|z - centre| >= FAR_RATIO * radius`.
const FAR_RATIO: f64 = 3.0;
/// Cells nearer than this many spacings use the closed form.
const EXACT_CELLS: f64 = 16.0;

#[derive(Debug)]
struct Tile {
    center: C64,
    radius: f64,
    cells: Vec<(C64, C64)>,
    moments: Vec<C64>,
}

#[derive(Debug)]
pub(crate) struct CellSum {
    tiles: Vec<Tile>,
    half: C64,
    /// `∬ u^k dA` over one cell for `k = 0, 2, 4`; odd moments vanish.
    m: [f64; 3],
    exact_radius: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl CellSum {
    pub(crate) fn new(grid: &Grid, h: &[C64]) -> Self {
        let (dx, dy) = (grid.dx(), grid.dy());
        let (a, b) = (dx / 2.0, dy / 2.0);
        let area = 4.0 * a * b;
        let m = [area, area * (a * a - b * b) / 3.0, area * (a.powi(4) / 5.0 - 2.0 * a * a * b * b / 3.0 + b.powi(4) / 5.0)];
        let mut tiles = Vec::new();
        for tj in (0..grid.ny).step_by(TILE) {
            for ti in (0..grid.nx).step_by(TILE) {
                let mut cells = Vec::new();
                for j in tj..(tj + TILE).min(grid.ny) {
                    for i in ti..(ti + TILE).min(grid.nx) {
                        let v = h[j * grid.nx + i];
                        if v.norm() != 0.0 {
                            cells.push((grid.node(i, j), v));
                        }
                    }
                }
                if cells.is_empty() {
                    continue;
                }
                let center = cells.iter().map(|p| p.0).sum::<C64>() / cells.len() as f64;
                let radius = cells.iter().map(|p| (p.0 - center).norm()).fold(0.0, f64::max) + a.hypot(b);
                let mut moments = vec![c(0.0, 0.0); TERMS];
                for &(node, v) in &cells {
                    let d = node - center;
                    // powers of d up to TERMS
                    let mut pw = vec![c(1.0, 0.0); TERMS];
                    for k in 1..TERMS {
                        pw[k] = pw[k - 1] * d;
                    }
                    for (k, q) in moments.iter_mut().enumerate() {
                        let mut s = pw[k] * m[0];
                        if k >= 2 {
                            s += pw[k - 2] * (binomial(k, 2) * m[1]);
                        }
                        if k >= 4 {
                            s += pw[k - 4] * (binomial(k, 4) * m[2]);
                        }
                        *q += v * s;
                    }
                }
                tiles.push(Tile { center, radius, cells, moments });
            }
        }
        CellSum { tiles, half: c(a, b), m, exact_radius: EXACT_CELLS * dx.max(dy) }
    }

    pub(crate) fn eval(&self, z: C64) -> C64 {
        let mut total = c(0.0, 0.0);
        for t in &self.tiles {
            let s = z - t.center;
            if s.norm() >= FAR_RATIO * t.radius {
                let inv = s.inv();
                let mut pw = inv;
                for q in &t.moments {
                    total += q * pw;
                    pw *= inv;
                }
                continue;
            }
            for &(node, v) in &t.cells {
                let o = z - node;
                if o.norm() < self.exact_radius {
                    total += v * inv_u_integral(o - self.half, o + self.half);
                } else {
                    let inv = o.inv();
                    let inv2 = inv * inv;
                    total += v * inv * (self.m[0] + inv2 * (self.m[1] + inv2 * self.m[2]));
                }
            }
        }
        total
    }
}
