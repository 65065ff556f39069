//! The cosh-power interpolation `G`: equal to `2cosh` on the boundary of the
//! square `E = [-2dπ, 2dπ]²` and on `iℝ` outside the disc `|z| < R`, equal
//! to `(z/R)^{2d}` on that disc, with `R = (d - 1/3)π`.
//!
//! The construction works in the quadrant square `Q = [0, 2dπ]²`. A
//! four-cell map `Phi1: Q → Ω` straightens the quarter annulus
//! `Ω = (E ∖ D_R) ∩ {Re, Im ≥ 0}`, and `QuadrantMap` on `Q` is `2cosh`
//! except on the thin strip `0 ≤ Re ≤ 1`, `Im ≤ (d - 1/6)π`, where the
//! trapezoids `S` (map `Phi3`) and `T` (map `Phi2`) unwind the strip onto the
//! unit circle. `G = QuadrantMap ∘ Phi1⁻¹` on `Ω`, extended by evenness and
//! conjugation symmetry.

use std::f64::consts::{E, PI};

use super::patch::{arc, ci, locate_in, Cell, Curve, Patch, Wirtinger};
use super::piece::{QrPiece, Region};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Rectangle, C64};

pub const MAX_DEGREE: u32 = 64;

fn check_degree(d: u32) -> Result<()> {
    if !(1..=MAX_DEGREE).contains(&d) {
        return Err(QrwdError::OutOfRange(format!("d must lie in 1..={MAX_DEGREE}, got {d}")));
    }
    Ok(())
}

/// `R = (d - 1/3)π`.
pub fn disc_radius(d: u32) -> f64 {
    (d as f64 - 1.0 / 3.0) * PI
}

/// Distance of `2cosh(iR)` and `(iR/R)^{2d}` from `(-1)^d`: the two rules agree at `iR`.
pub fn matching_defect(d: u32) -> (f64, f64) {
    let r = disc_radius(d);
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let cosh_side = (cosh2(c(0.0, r)) - sign).norm();
    let power_side = (ci(1.0).powu(2 * d) - sign).norm();
    (cosh_side, power_side)
}

/// Height where the slanted edge between `S` and `T` meets `iℝ`.
pub fn slant_height(d: u32) -> f64 {
    (2.0 * d as f64 - 1.0) / (2.0 * d as f64) * disc_radius(d)
}

fn cosh2(z: C64) -> C64 {
    z.cosh() * 2.0
}

/// Largest `|μ|` of a cell over a parameter grid, skipping the collapsed edge of triangles.
fn cell_sup_mu(cell: &Cell, n: usize) -> f64 {
    let mut sup = 0.0f64;
    for a in 0..=n {
        for b in 1..=n {
            let w = cell.wirtinger_at(a as f64 / n as f64, b as f64 / n as f64);
            if w.jacobian() != 0.0 {
                sup = sup.max(w.mu().norm());
            }
        }
    }
    sup
}

fn k_of(mu: f64) -> f64 {
    (1.0 + mu) / (1.0 - mu)
}

/// Straightens `Q = [0, 2dπ]²` onto the quarter annulus `Ω`.
#[derive(Debug, Clone)]
pub struct Phi1 {
    pub d: u32,
    pub r: f64,
    pub side: f64,
    /// Inner, bottom, right, top.
    pub cells: [Cell; 4],
    bound: f64,
}

pub fn build_phi1(d: u32) -> Result<Phi1> {
    check_degree(d)?;
    let (r, l) = (disc_radius(d), 2.0 * d as f64 * PI);
    let a = 0.75 * l;
    let p1 = c(a, r);
    let p2 = c(a, 1.5 * r);
    let seg = Curve::segment;
    let cells = [
        Cell::new(Patch::new(seg(c(0.0, 0.0), ci(r)), seg(c(a, 0.0), p1)), Patch::new(arc(c(0.0, 0.0), r, 0.0, PI / 2.0), seg(c(a, 0.0), p2))),
        Cell::new(Patch::new(seg(c(a, 0.0), p1), seg(c(l, 0.0), c(l, r))), Patch::new(seg(c(a, 0.0), p2), seg(c(l, 0.0), c(l, r)))),
        Cell::new(Patch::new(seg(p1, c(a, l)), seg(c(l, r), c(l, l))), Patch::new(seg(p2, c(a, l)), seg(c(l, r), c(l, l)))),
        Cell::new(Patch::new(seg(ci(r), ci(l)), seg(p1, c(a, l))), Patch::new(seg(ci(r), ci(l)), seg(p2, c(a, l)))),
    ];
    let sup = cells.iter().map(|cl| cell_sup_mu(cl, 64)).fold(0.0, f64::max);
    Ok(Phi1 { d, r, side: l, cells, bound: k_of(sup) })
}

impl Phi1 {
    fn split(&self) -> f64 {
        0.75 * self.side
    }

    /// Cell of a point of `Q`, by the straight partition lines.
    fn src_cell(&self, z: C64) -> usize {
        match (z.re < self.split(), z.im < self.r) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        }
    }

    /// Cell of a point of `Ω`; the partition lines through `p2` are straight.
    fn dst_cell(&self, z: C64) -> usize {
        let a = self.split();
        let p2 = c(a, 1.5 * self.r);
        if z.re >= a {
            let corner = c(self.side, self.r);
            let cross = (corner - p2).re * (z - p2).im - (corner - p2).im * (z - p2).re;
            if cross <= 0.0 {
                1
            } else {
                2
            }
        } else {
            let from = ci(self.r);
            let cross = (p2 - from).re * (z - from).im - (p2 - from).im * (z - from).re;
            if cross <= 0.0 {
                0
            } else {
                3
            }
        }
    }

    pub fn forward(&self, z: C64) -> Result<(C64, Wirtinger, usize)> {
        let k = self.src_cell(z);
        let cell = &self.cells[k];
        let (s, t) = cell
            .src
            .invert(z)
            .ok_or_else(|| QrwdError::Constructive(format!("Phi1 cell {k} does not contain {z}")))?;
        Ok((cell.eval_at(s, t), cell.wirtinger_at(s, t), k))
    }

    /// Preimage in `Q` of a point of `Ω`, with the derivatives of `Phi1` there.
    pub fn inverse(&self, w: C64) -> Result<(C64, Wirtinger, usize)> {
        let first = self.dst_cell(w);
        let order = std::iter::once(first).chain((0..4).filter(move |&k| k != first));
        for k in order {
            let cell = &self.cells[k];
            if let Some((s, t)) = cell.dst.invert(w) {
                if super::patch::in_unit_square(s, t) {
                    return Ok((cell.src.eval(s, t), cell.wirtinger_at(s, t), k));
                }
            }
        }
        Err(QrwdError::Constructive(format!("Phi1 inversion failed at {w}")))
    }

    pub fn dst_seams(&self, n: usize) -> Vec<Vec<C64>> {
        let a = self.split();
        let p2 = c(a, 1.5 * self.r);
        [(c(a, 0.0), p2), (ci(self.r), p2), (p2, c(self.side, self.r)), (p2, c(a, self.side))]
            .iter()
            .map(|&(u, v)| Curve::segment(u, v).polyline(n))
            .collect()
    }
}

impl QrPiece for Phi1 {
    fn name(&self) -> String {
        "phi1".into()
    }
    fn degree(&self) -> Option<u32> {
        Some(self.d)
    }
    fn domain(&self) -> Region {
        let h = self.side / 2.0;
        Region::Rect(Rectangle { center: c(h, h), half_width: h, half_height: h })
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        self.forward(z).map(|(w, _, k)| (w, k as u32))
    }
    fn seams(&self) -> Vec<Vec<C64>> {
        let (a, l, r) = (self.split(), self.side, self.r);
        vec![Curve::segment(c(a, 0.0), c(a, l)).polyline(256), Curve::segment(ci(r), c(l, r)).polyline(256)]
    }
    fn declared_bound(&self) -> f64 {
        self.bound
    }
}

/// The strip cell `S → A`, `s + it ↦ (1-s)e^{it} + s·2cosh(1+it)` on the straightened trapezoid.
#[derive(Debug, Clone)]
pub struct Phi3 {
    pub d: u32,
    pub cell: Cell,
    bound: f64,
}

pub fn build_phi3(d: u32) -> Result<Phi3> {
    check_degree(d)?;
    let top = (d as f64 - 0.5) * PI;
    let src = Patch::new(Curve::segment(c(0.0, 0.0), ci(slant_height(d))), Curve::segment(c(1.0, 0.0), c(1.0, top)));
    let dst = Patch::new(arc(c(0.0, 0.0), 1.0, 0.0, top), Curve::cosh(c(1.0, 0.0), c(1.0, top)));
    let cell = Cell::new(src, dst);
    let bound = k_of(cell_sup_mu(&cell, 256));
    Ok(Phi3 { d, cell, bound })
}

impl Phi3 {
    pub fn eval_jet(&self, z: C64) -> Result<(C64, Wirtinger)> {
        let (s, t) = self
            .cell
            .src
            .invert(z)
            .ok_or_else(|| QrwdError::Constructive(format!("Phi3 inversion failed at {z}")))?;
        Ok((self.cell.eval_at(s, t), self.cell.wirtinger_at(s, t)))
    }
}

impl QrPiece for Phi3 {
    fn name(&self) -> String {
        "phi3".into()
    }
    fn degree(&self) -> Option<u32> {
        Some(self.d)
    }
    fn domain(&self) -> Region {
        Region::Polygon { vertices: self.cell.src.corners().to_vec() }
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        self.eval_jet(z).map(|(w, _)| (w, 0))
    }
    fn declared_bound(&self) -> f64 {
        self.bound
    }
}

/// The trapezoid cell `T → A_*`, six cells in coordinates shifted down by `(d-1)π i`.
///
/// In the shifted frame the image is the part of the annulus between the
/// unit circle and the ellipse `g(Re = 1)` in the closed second quadrant,
/// outside the hyperbola `g(Im = 5π/6)`; the result is multiplied by
/// `(-1)^{d-1}`. Cells whose two curved sides meet at a corner of `T` are
/// triangles collapsed at that corner.
#[derive(Debug, Clone)]
pub struct Phi2 {
    pub d: u32,
    /// Lower-left, upper-left, top-left triangle, lower-right, upper-right, top-right triangle.
    pub cells: [Cell; 6],
    shift: f64,
    sign: f64,
    slant: f64,
    bound: f64,
}

pub fn build_phi2(d: u32) -> Result<Phi2> {
    check_degree(d)?;
    let shift = (d as f64 - 1.0) * PI;
    let yt = slant_height(d) - shift;
    let (h0, h1, h2, h3) = (2.0 * PI / 3.0, 0.75 * PI, 5.0 * PI / 6.0, 0.5 * PI);
    let a0 = ci(yt);
    let a1 = ci(h0);
    let a2 = ci(h2);
    let a3 = c(1.0, h2);
    let a4 = c(1.0, h3);
    let ml = ci(h1);
    let mt = c(0.5, h2);
    let mr = c(1.0, h1);
    let mb = c(0.5, (yt + h3) / 2.0);
    let mid = c(0.5, h0);
    let r1 = c(1.0, h0);
    let slanted = |u: f64| ci((1.0 - u) + u * (E - 1.0 / E));
    let seg = Curve::segment;
    let cells = [
        Cell::new(Patch::new(seg(a0, a1), seg(mb, mid)), Patch::new(arc(c(0.0, 0.0), 1.0, PI / 2.0, PI), seg(slanted(0.5), cosh2(mid)))),
        Cell::new(Patch::new(seg(a1, ml), seg(mid, mt)), Patch::new(Curve::cosh(a1, ml), seg(cosh2(mid), cosh2(mt)))),
        Cell::new(Patch::new(seg(a2, ml), seg(a2, mt)), Patch::new(Curve::cosh(a2, ml), Curve::cosh(a2, mt))),
        Cell::new(Patch::new(seg(mb, mid), seg(a4, r1)), Patch::new(seg(slanted(0.5), cosh2(mid)), Curve::cosh(a4, r1))),
        Cell::new(Patch::new(seg(mid, mt), seg(r1, mr)), Patch::new(seg(cosh2(mid), cosh2(mt)), Curve::cosh(r1, mr))),
        Cell::new(Patch::new(seg(a3, mt), seg(a3, mr)), Patch::new(Curve::cosh(a3, mt), Curve::cosh(a3, mr))),
    ];
    let sup = cells.iter().map(|cl| cell_sup_mu(cl, 128)).fold(0.0, f64::max);
    let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
    Ok(Phi2 { d, cells, shift, sign, slant: yt, bound: k_of(sup) })
}

impl Phi2 {
    /// Cell guess in the shifted frame; all internal edges are straight.
    fn guess(&self, z: C64) -> usize {
        let h0 = 2.0 * PI / 3.0;
        let above = |p: C64, q: C64| (q - p).re * (z - p).im - (q - p).im * (z - p).re > 0.0;
        let (ml, mt, mr) = (ci(0.75 * PI), c(0.5, 5.0 * PI / 6.0), c(1.0, 0.75 * PI));
        if z.re < 0.5 {
            if z.im < h0 {
                0
            } else if above(ml, mt) {
                2
            } else {
                1
            }
        } else if z.im < h0 {
            3
        } else if above(mt, mr) {
            5
        } else {
            4
        }
    }

    pub fn eval_jet(&self, z: C64) -> Result<(C64, Wirtinger, usize)> {
        let zs = z - ci(self.shift);
        // collapsed corners
        for (k, corner) in [(2, ci(5.0 * PI / 6.0)), (5, c(1.0, 5.0 * PI / 6.0))] {
            if (zs - corner).norm() < 1e-13 {
                let w = cosh2(corner) * self.sign;
                return Ok((w, Wirtinger::holomorphic(corner.sinh() * (2.0 * self.sign)), k));
            }
        }
        let first = self.guess(zs);
        let (k, s, t) = match self.cells[first].locate(zs) {
            Some((s, t)) => (first, s, t),
            None => locate_in(&self.cells, zs).ok_or_else(|| QrwdError::Constructive(format!("Phi2: {z} is outside T")))?,
        };
        let cell = &self.cells[k];
        let w = cell.wirtinger_at(s, t);
        Ok((cell.eval_at(s, t) * self.sign, Wirtinger { dz: w.dz * self.sign, dzb: w.dzb * self.sign }, k))
    }

    pub fn vertices(&self) -> Vec<C64> {
        let sh = ci(self.shift);
        vec![ci(self.slant) + sh, c(1.0, 0.5 * PI) + sh, c(1.0, 5.0 * PI / 6.0) + sh, ci(5.0 * PI / 6.0) + sh]
    }

    pub fn internal_seams(&self, n: usize) -> Vec<Vec<C64>> {
        let sh = ci(self.shift);
        let mut out = Vec::new();
        for cell in &self.cells {
            for edge in cell.src_edges(n) {
                out.push(edge.into_iter().map(|p| p + sh).collect());
            }
        }
        out
    }
}

impl QrPiece for Phi2 {
    fn name(&self) -> String {
        "phi2".into()
    }
    fn degree(&self) -> Option<u32> {
        Some(self.d)
    }
    fn domain(&self) -> Region {
        Region::Polygon { vertices: self.vertices() }
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        self.eval_jet(z).map(|(w, _, k)| (w, k as u32))
    }
    fn seams(&self) -> Vec<Vec<C64>> {
        self.internal_seams(64)
    }
    fn declared_bound(&self) -> f64 {
        self.bound
    }
}

/// The map on the quadrant square `Q` before straightening.
#[derive(Debug, Clone)]
pub struct QuadrantMap {
    pub d: u32,
    pub phi2: Phi2,
    pub phi3: Phi3,
}

/// Branch ids of [`QuadrantMap`].
pub const BRANCH_COSH: u32 = 0;
pub const BRANCH_STRIP: u32 = 1;
pub const BRANCH_TRAPEZOID: u32 = 2;

impl QuadrantMap {
    pub fn new(d: u32) -> Result<Self> {
        Ok(QuadrantMap { d, phi2: build_phi2(d)?, phi3: build_phi3(d)? })
    }

    fn strip_top(&self) -> f64 {
        (self.d as f64 - 1.0 / 6.0) * PI
    }

    /// Height of the slanted edge above `Re z = x`.
    fn slant_at(&self, x: f64) -> f64 {
        let y0 = slant_height(self.d);
        y0 + x * ((self.d as f64 - 0.5) * PI - y0)
    }

    pub fn eval_jet(&self, z: C64) -> Result<(C64, Wirtinger, u32)> {
        if z.re > 1.0 || z.im > self.strip_top() {
            return Ok((cosh2(z), Wirtinger::holomorphic(z.sinh() * 2.0), BRANCH_COSH));
        }
        if z.im >= self.slant_at(z.re) {
            let (w, j, k) = self.phi2.eval_jet(z)?;
            Ok((w, j, BRANCH_TRAPEZOID + k as u32))
        } else {
            let (w, j) = self.phi3.eval_jet(z)?;
            Ok((w, j, BRANCH_STRIP))
        }
    }

    /// Seams inside `Q`: the outline of the strip and the internal cells of `T`.
    pub fn seams(&self, n: usize) -> Vec<Vec<C64>> {
        let top = self.strip_top();
        let mut out = vec![
            Curve::segment(c(1.0, 0.0), c(1.0, top)).polyline(n),
            Curve::segment(ci(top), c(1.0, top)).polyline(n),
            Curve::segment(ci(slant_height(self.d)), c(1.0, (self.d as f64 - 0.5) * PI)).polyline(n),
        ];
        out.extend(self.phi2.internal_seams(n));
        out
    }
}

/// `G` on the full square `E`.
#[derive(Debug, Clone)]
pub struct CoshPowerMap {
    pub d: u32,
    pub r: f64,
    pub side: f64,
    pub phi1: Phi1,
    pub quadrant: QuadrantMap,
    bound: f64,
}

pub fn build_g(d: u32, r: f64) -> Result<CoshPowerMap> {
    check_degree(d)?;
    if (r - disc_radius(d)).abs() > 1e-12 * r.abs().max(1.0) {
        return Err(QrwdError::Precondition(format!("R must equal (d - 1/3)pi = {}, got {r}", disc_radius(d))));
    }
    let phi1 = build_phi1(d)?;
    let quadrant = QuadrantMap::new(d)?;
    let bound = phi1.declared_bound() * quadrant.phi2.declared_bound().max(quadrant.phi3.declared_bound());
    Ok(CoshPowerMap { d, r: disc_radius(d), side: 2.0 * d as f64 * PI, phi1, quadrant, bound })
}

/// Branch id of the power map on the disc.
pub const BRANCH_POWER: u32 = 0;

impl CoshPowerMap {
    /// Value, derivatives and branch id at `z ∈ E`.
    pub fn eval_jet(&self, z: C64) -> Result<(C64, Wirtinger, u32)> {
        let edge = self.side * (1.0 + 1e-12);
        if !(z.re.abs() <= edge && z.im.abs() <= edge) {
            return Err(QrwdError::Domain(format!("{z} is outside the square E")));
        }
        if z.norm() <= self.r {
            let n = 2 * self.d as i32;
            let u = z / self.r;
            return Ok((u.powi(n), Wirtinger::holomorphic(u.powi(n - 1) * (n as f64 / self.r)), BRANCH_POWER));
        }
        // fold into the closed first quadrant; G(-z) = G(z), G(conj z) = conj G(z)
        let flip_x = z.re < 0.0;
        let flip_y = z.im < 0.0;
        let zq = c(z.re.abs().min(self.side), z.im.abs().min(self.side));
        let (q, jq, cell) = self.phi1.inverse(zq)?;
        let (w, jw, branch) = self.quadrant.eval_jet(q)?;
        let jet = jw.over(jq);
        let quadrant_id = (flip_x as u32) * 2 + flip_y as u32;
        let id = 1 + quadrant_id * 1000 + cell as u32 * 100 + branch;
        // z = ±zq keeps the value, z = ±conj(zq) conjugates it
        Ok(if flip_x == flip_y {
            let s = if flip_x { -1.0 } else { 1.0 };
            (w, Wirtinger { dz: jet.dz * s, dzb: jet.dzb * s }, id)
        } else {
            let s = if flip_x { -1.0 } else { 1.0 };
            // conj(H(conj(s z))) style reflection
            let inner = Wirtinger { dz: c(0.0, 0.0), dzb: c(s, 0.0) };
            (w.conj(), inner.then(jet).conj_map(), id)
        })
    }

    /// All seams, in the four quadrants.
    pub fn seam_lines(&self, n: usize) -> Vec<Vec<C64>> {
        let mut quarter: Vec<Vec<C64>> = self.phi1.dst_seams(n);
        for line in self.quadrant.seams(n) {
            let mapped: Vec<C64> = line.iter().filter_map(|&p| self.phi1.forward(p).ok().map(|x| x.0)).collect();
            quarter.push(mapped);
        }
        quarter.push(Curve::segment(c(self.r, 0.0), c(self.side, 0.0)).polyline(n));
        quarter.push(Curve::segment(ci(self.r), ci(self.side)).polyline(n));
        let mut out = Vec::new();
        for line in quarter {
            for f in [|p: C64| p, |p: C64| -p, |p: C64| p.conj(), |p: C64| -p.conj()] {
                out.push(line.iter().map(|&p| f(p)).collect());
            }
        }
        out.push(arc(c(0.0, 0.0), self.r, 0.0, 2.0 * PI).polyline(8 * n));
        out
    }

    /// Sup of the analytic `|μ_G|` over a parameter grid of `Q` (before straightening).
    pub fn analytic_sup_mu(&self, n: usize) -> Result<f64> {
        let mut sup = 0.0f64;
        for a in 0..=n {
            for b in 0..=n {
                let q = c(self.side * a as f64 / n as f64, self.side * b as f64 / n as f64);
                let (_, jq, _) = self.phi1.forward(q)?;
                let (_, jw, _) = self.quadrant.eval_jet(q)?;
                let jet = jw.over(jq);
                if jet.jacobian() > 0.0 {
                    sup = sup.max(jet.mu().norm());
                }
            }
        }
        Ok(sup)
    }
}

impl QrPiece for CoshPowerMap {
    fn name(&self) -> String {
        "G".into()
    }
    fn degree(&self) -> Option<u32> {
        Some(self.d)
    }
    fn domain(&self) -> Region {
        Region::Rect(Rectangle { center: c(0.0, 0.0), half_width: self.side, half_height: self.side })
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        self.eval_jet(z).map(|(w, _, b)| (w, b))
    }
    fn seams(&self) -> Vec<Vec<C64>> {
        self.seam_lines(128)
    }
    fn declared_bound(&self) -> f64 {
        self.bound
    }
}
