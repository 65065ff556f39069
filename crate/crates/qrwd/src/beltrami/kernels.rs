//! Cell-averaged Cauchy and Beurling kernels and their FFT convolution.
//!
//! Samples are read as piecewise constant on cells centred at the grid
//! nodes. Both kernels are integrated exactly over each cell, so the only
//! discretisation error is the piecewise-constant reading of the density.
//! Zero padding to twice the grid size makes the circular convolution a
//! linear one on the grid.

use std::f64::consts::{FRAC_1_PI, PI};
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::numerics::{c, C64};

/// `Σ ± F(corner)` over the rectangle `[lo, hi]`, with logs taken relative to its centre.
fn corner_sum(lo: C64, hi: C64, f: impl Fn(C64, C64) -> C64) -> C64 {
    let centre = (lo + hi) / 2.0;
    f(hi, centre) - f(c(lo.re, hi.im), centre) - f(c(hi.re, lo.im), centre) + f(lo, centre)
}

/// `∫∫ 1/u dA` over a rectangle that meets the origin at most on its boundary.
fn inv_u_integral_regular(lo: C64, hi: C64) -> C64 {
    // antiderivative -i(u ln u - u); the ln(centre) and linear parts cancel in the corner sum
    corner_sum(lo, hi, |u, centre| {
        if u.norm() == 0.0 {
            c(0.0, 0.0)
        } else {
            c(0.0, -1.0) * (u * (u / centre).ln())
        }
    })
}

/// `∫∫ 1/u dA` over any rectangle, splitting at the origin when it lies inside.
pub fn inv_u_integral(lo: C64, hi: C64) -> C64 {
    let inside_x = lo.re < 0.0 && hi.re > 0.0;
    let inside_y = lo.im < 0.0 && hi.im > 0.0;
    match (inside_x, inside_y) {
        (false, false) => inv_u_integral_regular(lo, hi),
        (true, false) => inv_u_integral_regular(lo, c(0.0, hi.im)) + inv_u_integral_regular(c(0.0, lo.im), hi),
        (false, true) => inv_u_integral_regular(lo, c(hi.re, 0.0)) + inv_u_integral_regular(c(lo.re, 0.0), hi),
        (true, true) => {
            inv_u_integral_regular(lo, c(0.0, 0.0))
                + inv_u_integral_regular(c(0.0, lo.im), c(hi.re, 0.0))
                + inv_u_integral_regular(c(lo.re, 0.0), c(0.0, hi.im))
                + inv_u_integral_regular(c(0.0, 0.0), hi)
        }
    }
}

/// `∫∫ 1/u² dA` over a rectangle not containing the origin.
fn inv_u2_integral_regular(lo: C64, hi: C64) -> C64 {
    corner_sum(lo, hi, |u, centre| c(0.0, 1.0) * (u / centre).ln())
}

/// Principal value of `∫∫ 1/u² dA` over `[-a, a] × [-b, b]`.
///
/// In polar form this is `4 ∫_0^{π/2} cos 2t · ln ρ(t) dt` with `ρ` the distance to the edge.
pub fn inv_u2_central_pv(a: f64, b: f64) -> f64 {
    let split = (b / a).atan();
    let simpson = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| {
        let n = 2000;
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for k in 1..n {
            s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let near = simpson(0.0, split, &|t: f64| (2.0 * t).cos() * (a / t.cos()).ln());
    let far = simpson(split, PI / 2.0, &|t: f64| (2.0 * t).cos() * (b / t.sin()).ln());
    4.0 * (near + far)
}

/// Kernels on the zero-padded grid, already transformed.
pub struct Convolver {
    pub nx: usize,
    pub ny: usize,
    px: usize,
    py: usize,
    cauchy_hat: Vec<C64>,
    beurling_hat: Vec<C64>,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Convolver {
    /// Grid of `nx × ny` nodes with spacings `dx`, `dy`.
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Self {
        let (px, py) = (2 * nx, 2 * ny);
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(px);
        let row_inv = planner.plan_fft_inverse(px);
        let col_fwd = planner.plan_fft_forward(py);
        let col_inv = planner.plan_fft_inverse(py);
        let pv = inv_u2_central_pv(dx / 2.0, dy / 2.0);
        let offset = |k: usize, n: usize, p: usize| -> Option<i64> {
            if k < n {
                Some(k as i64)
            } else if k > p - n {
                Some(k as i64 - p as i64)
            } else {
                None
            }
        };
        let mut cauchy = vec![c(0.0, 0.0); px * py];
        let mut beurling = vec![c(0.0, 0.0); px * py];
        cauchy.par_chunks_mut(px).zip(beurling.par_chunks_mut(px)).enumerate().for_each(|(l, (crow, brow))| {
            let Some(oy) = offset(l, ny, py) else { return };
            for k in 0..px {
                let Some(ox) = offset(k, nx, px) else { continue };
                let o = c(ox as f64 * dx, oy as f64 * dy);
                let half = c(dx / 2.0, dy / 2.0);
                crow[k] = inv_u_integral(o - half, o + half) * FRAC_1_PI;
                brow[k] = if ox == 0 && oy == 0 {
                    c(-FRAC_1_PI * pv, 0.0)
                } else {
                    inv_u2_integral_regular(o - half, o + half) * -FRAC_1_PI
                };
            }
        });
        let mut conv = Convolver {
            nx,
            ny,
            px,
            py,
            cauchy_hat: Vec::new(),
            beurling_hat: Vec::new(),
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
        };
        conv.fft2(&mut cauchy, false);
        conv.fft2(&mut beurling, false);
        conv.cauchy_hat = cauchy;
        conv.beurling_hat = beurling;
        conv
    }

    fn fft2(&self, data: &mut [C64], inverse: bool) {
        let (px, py) = (self.px, self.py);
        let (row, col) = if inverse { (&self.row_inv, &self.col_inv) } else { (&self.row_fwd, &self.col_fwd) };
        data.par_chunks_mut(px).for_each(|r| row.process(r));
        let mut t = vec![c(0.0, 0.0); px * py];
        t.par_chunks_mut(py).enumerate().for_each(|(k, colbuf)| {
            for l in 0..py {
                colbuf[l] = data[l * px + k];
            }
            col.process(colbuf);
        });
        data.par_chunks_mut(px).enumerate().for_each(|(l, r)| {
            for k in 0..px {
                r[k] = t[k * py + l];
            }
        });
        if inverse {
            let scale = 1.0 / (px * py) as f64;
            data.par_iter_mut().for_each(|v| *v *= scale);
        }
    }

    fn convolve(&self, h: &[C64], hat: &[C64]) -> Vec<C64> {
        assert_eq!(h.len(), self.nx * self.ny);
        let mut buf = vec![c(0.0, 0.0); self.px * self.py];
        for l in 0..self.ny {
            buf[l * self.px..l * self.px + self.nx].copy_from_slice(&h[l * self.nx..(l + 1) * self.nx]);
        }
        self.fft2(&mut buf, false);
        buf.par_iter_mut().zip(hat.par_iter()).for_each(|(b, k)| *b *= k);
        self.fft2(&mut buf, true);
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for l in 0..self.ny {
            out.extend_from_slice(&buf[l * self.px..l * self.px + self.nx]);
        }
        out
    }

    /// Cauchy transform `(1/π) ∫∫ h(w)/(z - w) dA(w)` at the nodes.
    pub fn cauchy(&self, h: &[C64]) -> Vec<C64> {
        self.convolve(h, &self.cauchy_hat)
    }

    /// Beurling transform `-(1/π) p.v. ∫∫ h(w)/(z - w)² dA(w)` at the nodes.
    pub fn beurling(&self, h: &[C64]) -> Vec<C64> {
        self.convolve(h, &self.beurling_hat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint rule on a fine subgrid.
    fn brute(lo: C64, hi: C64, f: impl Fn(C64) -> C64) -> C64 {
        let n = 800;
        let (dx, dy) = ((hi.re - lo.re) / n as f64, (hi.im - lo.im) / n as f64);
        let mut s = c(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += f(lo + c((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dy));
            }
        }
        s * dx * dy
    }

    #[test]
    fn cell_integrals_match_quadrature() {
        for (lo, hi) in [(c(1.0, 0.5), c(2.0, 1.5)), (c(-2.5, -0.5), c(-1.5, 0.5)), (c(-0.5, -3.0), c(0.5, -2.0))] {
            let a = inv_u_integral(lo, hi);
            let b = brute(lo, hi, |u| 1.0 / u);
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
            let a = inv_u2_integral_regular(lo, hi);
            let b = brute(lo, hi, |u| 1.0 / (u * u));
            assert!((a - b).norm() < 1e-5, "{a} vs {b}");
        }
        // symmetric cell: both vanish; a square cell has zero principal value
        assert!(inv_u_integral(c(-0.5, -0.5), c(0.5, 0.5)).norm() < 1e-15);
        assert!(inv_u2_central_pv(0.5, 0.5).abs() < 1e-12);
        // the principal value of a 2:1 cell is 4 ∫ cos2t ln ρ dt; check against a ring-excised sum
        let (a, b) = (1.0, 0.5);
        let excised = {
            let n = 2000;
            let (dx, dy) = (2.0 * a / n as f64, 2.0 * b / n as f64);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let u = c(-a + (i as f64 + 0.5) * dx, -b + (j as f64 + 0.5) * dy);
                    if u.norm() > 0.25 {
                        s += (1.0 / (u * u)).re;
                    }
                }
            }
            s * dx * dy
        };
        assert!((inv_u2_central_pv(a, b) - excised).abs() < 1e-4);
    }

    #[test]
    fn cauchy_of_disc_indicator() {
        // P[χ_D](z) = conj z inside the unit disc, 1/z outside
        let n = 129;
        let d = 4.0 / (n - 1) as f64;
        let conv = Convolver::new(n, n, d, d);
        let node = |i: usize, j: usize| c(-2.0 + i as f64 * d, -2.0 + j as f64 * d);
        let mut h = vec![c(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                if node(i, j).norm() < 1.0 {
                    h[j * n + i] = c(1.0, 0.0);
                }
            }
        }
        let p = conv.cauchy(&h);
        for (i, j) in [(64, 64), (80, 70), (20, 100), (120, 64)] {
            let z = node(i, j);
            let want = if z.norm() < 1.0 { z.conj() } else { 1.0 / z };
            assert!((p[j * n + i] - want).norm() < 0.05, "{z}: {} vs {want}", p[j * n + i]);
        }
    }
}
