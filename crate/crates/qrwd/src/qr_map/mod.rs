//! The global quasiregular maps built from `2cosh`: the even map `g_w`, its
//! real-symmetric sibling, the multi-square variant and the power variant
//! `z ↦ g_w(z^{p/2})`, plus region classification, the support of the
//! Beltrami coefficient, maximum modulus and winding counts.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::base_map::{toy_schedule_from_heights, Schedule, ToyParams};
use crate::error::{QrwdError, Result};
use crate::interpolation::{build_g, build_rho, disc_radius, CoshPowerMap, QrPiece, Region, ShiftMap, Wirtinger};
use crate::numerics::{c, Rectangle, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionLabel {
    Outside,
    Annulus { n: i64 },
    Disc { n: i64 },
    AnnulusMulti { n: i64, j: u32 },
    DiscMulti { n: i64, j: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `g_w(-z) = g_w(z)`.
    Even,
    /// Lower discs use the conjugate parameter, so `g(conj z) = conj g(z)`.
    Symmetric,
    /// Stacks of squares `E_n^j` at heights `h_n + 6jR_n`, upper parameters `w_n^j`.
    Multi,
}

/// Parameters `w_N, w_{N+1}, …`; indices past the stored list use `fill`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSequence {
    pub first_index: u32,
    pub w: Vec<C64>,
    pub fill: C64,
}

impl ParameterSequence {
    pub fn new(first_index: u32, w: Vec<C64>, fill: C64) -> Self {
        ParameterSequence { first_index, w, fill }
    }

    pub fn constant(first_index: u32, w: C64) -> Self {
        ParameterSequence { first_index, w: Vec::new(), fill: w }
    }

    pub fn get(&self, n: u32) -> C64 {
        n.checked_sub(self.first_index)
            .and_then(|k| self.w.get(k as usize).copied())
            .unwrap_or(self.fill)
    }

    /// Largest `|w_n|` including the fill value.
    pub fn sup_norm(&self) -> f64 {
        self.w.iter().map(|w| w.norm()).fold(self.fill.norm(), f64::max)
    }
}

/// Parameters of the multi-square variant, one list per level; missing entries use `fill`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiParameters {
    pub first_index: u32,
    pub w: Vec<Vec<C64>>,
    pub fill: C64,
}

impl MultiParameters {
    pub fn get(&self, n: u32, j: u32) -> C64 {
        n.checked_sub(self.first_index)
            .and_then(|k| self.w.get(k as usize))
            .and_then(|row| row.get(j as usize).copied())
            .unwrap_or(self.fill)
    }
}

/// A toy schedule whose level `n` carries `min(n - 2, q)` stacked squares per sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSchedule {
    pub q: u32,
    pub base: Schedule,
}

impl MultiSchedule {
    pub fn count(&self, n: u32) -> u32 {
        n.saturating_sub(2).min(self.q)
    }
}

/// Stacks are spaced so that consecutive levels keep a gap of `gap_factor` half-widths.
pub fn build_multi_schedule(p: &ToyParams, q: u32) -> Result<MultiSchedule> {
    if p.d.is_empty() || p.d.iter().any(|&d| d < 1) {
        return Err(QrwdError::Invalid("multi schedule needs d_n >= 1".into()));
    }
    let period = 2.0 * PI;
    let mut heights = Vec::new();
    let mut top: Option<f64> = None;
    for (k, &d) in p.d.iter().enumerate() {
        let n = p.first_index + k as u32;
        let half = 2.0 * d as f64 * PI;
        let lowest = match top {
            None => p.min_height.max((1.0 + p.gap_factor) * half),
            Some(t) => t + p.gap_factor * half + half,
        };
        let h = period * (lowest / period).ceil();
        let count = n.saturating_sub(2).min(q).max(1);
        top = Some(h + 6.0 * disc_radius(d) * (count - 1) as f64 + half);
        heights.push(h);
    }
    let base = toy_schedule_from_heights(p.first_index, &p.d, &heights)?;
    let s = MultiSchedule { q, base };
    validate_multi(&s)?;
    Ok(s)
}

/// Rejects stacks whose squares overlap.
pub fn validate_multi(s: &MultiSchedule) -> Result<()> {
    let mut rects: Vec<(String, Rectangle)> = Vec::new();
    for (n, l) in s.base.toy_levels()? {
        for j in 0..s.count(n) {
            let h = l.h + 6.0 * l.r * j as f64;
            let half = 2.0 * l.d as f64 * PI;
            rects.push((format!("E_{n}^{j}"), Rectangle::new(c(0.0, h), half, half)?));
            rects.push((format!("E_-{n}^{j}"), Rectangle::new(c(0.0, -h), half, half)?));
        }
    }
    for a in 0..rects.len() {
        for b in a + 1..rects.len() {
            if rects[a].1.overlaps(&rects[b].1) {
                return Err(QrwdError::Invalid(format!("squares {} and {} overlap", rects[a].0, rects[b].0)));
            }
        }
    }
    Ok(())
}

/// One modified square with the data needed to evaluate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Square {
    /// Signed level: positive above the real axis.
    pub n: i64,
    pub j: u32,
    pub center: C64,
    pub d: u32,
    pub r: f64,
    pub half: f64,
    /// Parameter of the shift map used on this disc.
    pub w: C64,
    pub multi: bool,
}

impl Square {
    pub fn contains(&self, z: C64) -> bool {
        let u = z - self.center;
        let edge = self.half * (1.0 + 1e-12);
        u.re.abs() <= edge && u.im.abs() <= edge
    }

    pub fn in_disc(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.r * (1.0 + 1e-12)
    }

    pub fn rect(&self) -> Rectangle {
        Rectangle { center: self.center, half_width: self.half, half_height: self.half }
    }

    fn label(&self, disc: bool) -> RegionLabel {
        match (self.multi, disc) {
            (false, false) => RegionLabel::Annulus { n: self.n },
            (false, true) => RegionLabel::Disc { n: self.n },
            (true, false) => RegionLabel::AnnulusMulti { n: self.n, j: self.j },
            (true, true) => RegionLabel::DiscMulti { n: self.n, j: self.j },
        }
    }
}

/// Annulus `E ∖ D(centre, inner_radius)` outside of which `μ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportRegion {
    pub n: i64,
    pub j: u32,
    pub square: Rectangle,
    pub center: C64,
    pub inner_radius: f64,
}

impl SupportRegion {
    pub fn contains(&self, z: C64) -> bool {
        self.square.contains_closed(z) && (z - self.center).norm() >= self.inner_radius
    }
}

/// An assembled map: immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct QrMap {
    pub variant: Variant,
    pub squares: Vec<Square>,
    pieces: BTreeMap<u32, CoshPowerMap>,
    shifts: Vec<ShiftMap>,
}

impl QrMap {
    /// `g_w` on a toy schedule.
    pub fn even(s: &Schedule, p: &ParameterSequence) -> Result<Self> {
        Self::single(s, p, Variant::Even)
    }

    /// The real-symmetric variant.
    pub fn symmetric(s: &Schedule, p: &ParameterSequence) -> Result<Self> {
        Self::single(s, p, Variant::Symmetric)
    }

    fn single(s: &Schedule, p: &ParameterSequence, variant: Variant) -> Result<Self> {
        let mut squares = Vec::new();
        for (n, l) in s.toy_levels()? {
            let w = p.get(n);
            let lower_w = if variant == Variant::Symmetric { w.conj() } else { w };
            let half = 2.0 * l.d as f64 * PI;
            for (sign, center, w) in [(1i64, l.h, w), (-1, -l.h, lower_w)] {
                squares.push(Square { n: sign * n as i64, j: 0, center: c(0.0, center), d: l.d, r: l.r, half, w, multi: false });
            }
        }
        Self::assemble(variant, squares)
    }

    /// The multi-square variant; lower discs use conjugate parameters.
    pub fn multi(s: &MultiSchedule, p: &MultiParameters) -> Result<Self> {
        validate_multi(s)?;
        let mut squares = Vec::new();
        for (n, l) in s.base.toy_levels()? {
            let half = 2.0 * l.d as f64 * PI;
            for j in 0..s.count(n) {
                let h = l.h + 6.0 * l.r * j as f64;
                let w = p.get(n, j);
                for (sign, w) in [(1i64, w), (-1, w.conj())] {
                    squares.push(Square { n: sign * n as i64, j, center: c(0.0, sign as f64 * h), d: l.d, r: l.r, half, w, multi: true });
                }
            }
        }
        Self::assemble(Variant::Multi, squares)
    }

    fn assemble(variant: Variant, squares: Vec<Square>) -> Result<Self> {
        let mut pieces = BTreeMap::new();
        let mut shifts = Vec::with_capacity(squares.len());
        for sq in &squares {
            if !pieces.contains_key(&sq.d) {
                pieces.insert(sq.d, build_g(sq.d, disc_radius(sq.d))?);
            }
            shifts.push(build_rho(sq.w)?);
        }
        Ok(QrMap { variant, squares, pieces, shifts })
    }

    fn find(&self, z: C64) -> Option<usize> {
        self.squares.iter().position(|sq| sq.contains(z))
    }

    /// Region of `z`; boundary points go to the innermost region.
    pub fn classify(&self, z: C64) -> RegionLabel {
        match self.find(z) {
            None => RegionLabel::Outside,
            Some(k) => {
                let sq = &self.squares[k];
                sq.label(sq.in_disc(z))
            }
        }
    }

    /// Value and Wirtinger derivatives at `z`.
    pub fn eval_jet(&self, z: C64) -> Result<(C64, Wirtinger)> {
        match self.find(z) {
            None => Ok((z.cosh() * 2.0, Wirtinger::holomorphic(z.sinh() * 2.0))),
            Some(k) => self.square_jet(k, z),
        }
    }

    /// The formula of square `k` evaluated at `z`, whichever side of its disc `z` is on.
    fn square_jet(&self, k: usize, z: C64) -> Result<(C64, Wirtinger)> {
        let sq = &self.squares[k];
        let g = &self.pieces[&sq.d];
        let (v, jet, _) = g.eval_jet(z - sq.center)?;
        if sq.in_disc(z) {
            let (u, jr, _) = self.shifts[k].eval_jet(v)?;
            Ok((u, jet.then(jr)))
        } else {
            Ok((v, jet))
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.eval_jet(z).map(|(v, _)| v)
    }

    /// Evaluates the formula belonging to `label` at `z`, for two-sided seam checks.
    pub fn eval_as(&self, z: C64, label: RegionLabel) -> Result<C64> {
        let (n, j, disc) = match label {
            RegionLabel::Outside => return Ok(z.cosh() * 2.0),
            RegionLabel::Annulus { n } => (n, 0, false),
            RegionLabel::Disc { n } => (n, 0, true),
            RegionLabel::AnnulusMulti { n, j } => (n, j, false),
            RegionLabel::DiscMulti { n, j } => (n, j, true),
        };
        let k = self
            .squares
            .iter()
            .position(|sq| sq.n == n && sq.j == j)
            .ok_or_else(|| QrwdError::Invalid(format!("no square for {label:?}")))?;
        let sq = &self.squares[k];
        let v = self.pieces[&sq.d].eval(z - sq.center)?;
        if disc {
            self.shifts[k].eval(v)
        } else {
            Ok(v)
        }
    }

    /// Beltrami coefficient at `z`.
    pub fn beltrami(&self, z: C64) -> Result<C64> {
        let (_, jet) = self.eval_jet(z)?;
        Ok(if jet.dzb == c(0.0, 0.0) { c(0.0, 0.0) } else { jet.mu() })
    }

    pub fn support_regions(&self) -> Vec<SupportRegion> {
        self.squares
            .iter()
            .map(|sq| SupportRegion {
                n: sq.n,
                j: sq.j,
                square: sq.rect(),
                center: sq.center,
                inner_radius: support_inner_radius(sq.d, sq.r),
            })
            .collect()
    }

    /// Smallest rectangle containing every modified square.
    pub fn extent(&self) -> Option<Rectangle> {
        let mut lo = c(f64::MAX, f64::MAX);
        let mut hi = c(f64::MIN, f64::MIN);
        for sq in &self.squares {
            lo = c(lo.re.min(sq.center.re - sq.half), lo.im.min(sq.center.im - sq.half));
            hi = c(hi.re.max(sq.center.re + sq.half), hi.im.max(sq.center.im + sq.half));
        }
        (lo.re <= hi.re).then(|| Rectangle { center: (lo + hi) / 2.0, half_width: (hi.re - lo.re) / 2.0, half_height: (hi.im - lo.im) / 2.0 })
    }

    /// Upper square of level `n` (and stack index `j`).
    pub fn square(&self, n: i64, j: u32) -> Option<&Square> {
        self.squares.iter().find(|sq| sq.n == n && sq.j == j)
    }
}

/// Radius `(1/8)^{1/(2d)}·R` inside which the disc formula is a translate of a power.
pub fn support_inner_radius(d: u32, r: f64) -> f64 {
    0.125f64.powf(1.0 / (2.0 * d as f64)) * r
}

impl QrPiece for QrMap {
    fn name(&self) -> String {
        format!("{:?}", self.variant).to_lowercase()
    }
    fn domain(&self) -> Region {
        let ext = self.extent().unwrap_or(Rectangle { center: c(0.0, 0.0), half_width: 1.0, half_height: 1.0 });
        let pad = 1.0;
        Region::Rect(Rectangle { center: ext.center, half_width: ext.half_width + pad, half_height: ext.half_height + pad })
    }
    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        let id = match self.find(z) {
            None => 0,
            Some(k) => {
                let sq = &self.squares[k];
                let (_, _, b) = self.pieces[&sq.d].eval_jet(z - sq.center)?;
                (k as u32 + 1) * 100_000 + b
            }
        };
        Ok((self.eval(z)?, id))
    }
    fn seams(&self) -> Vec<Vec<C64>> {
        let mut out = Vec::new();
        for sq in &self.squares {
            out.extend(sq.rect().boundary_samples(256).chunks(64).map(|ch| ch.to_vec()));
            for line in self.pieces[&sq.d].seam_lines(64) {
                out.push(line.into_iter().map(|p| p + sq.center).collect());
            }
        }
        out
    }
    fn declared_bound(&self) -> f64 {
        self.squares
            .iter()
            .zip(&self.shifts)
            .map(|(sq, rho)| self.pieces[&sq.d].declared_bound() * rho.declared_bound())
            .fold(1.0, f64::max)
    }
}

/// `z ↦ map(z^{p/2})` with the principal branch; well defined since the even map ignores the sign.
pub fn gpw_eval(map: &QrMap, z: C64, p_order: u32) -> Result<C64> {
    if p_order == 0 {
        return Err(QrwdError::OutOfRange("p_order must be >= 1".into()));
    }
    if map.variant != Variant::Even {
        return Err(QrwdError::Precondition("the power variant needs the even map".into()));
    }
    map.eval(principal_half_power(z, p_order))
}

pub fn principal_half_power(z: C64, p_order: u32) -> C64 {
    if z == c(0.0, 0.0) {
        return z;
    }
    if p_order % 2 == 0 {
        return z.powi(p_order as i32 / 2);
    }
    (z.ln() * (p_order as f64 / 2.0)).exp()
}

/// Largest `|f|` on `|z| = r`: 4096 samples, then golden-section refinement around the best one.
pub fn max_modulus<F: Fn(C64) -> Result<C64>>(r: f64, f: F) -> Result<f64> {
    if !(r > 0.0) {
        return Err(QrwdError::OutOfRange(format!("radius must be positive, got {r}")));
    }
    const SAMPLES: usize = 4096;
    let step = 2.0 * PI / SAMPLES as f64;
    let at = |t: f64| f(C64::from_polar(r, t)).map(|v| v.norm());
    let mut best = (f64::MIN, 0.0);
    for k in 0..SAMPLES {
        let t = k as f64 * step;
        let v = at(t)?;
        if v > best.0 {
            best = (v, t);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (at(x1)?, at(x2)?);
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = at(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = at(x1)?;
        }
    }
    Ok(best.0.max(f1).max(f2))
}

/// Winding number of `f - target` around the circle `|z - center| = radius`.
pub fn winding_number<F: Fn(C64) -> Result<C64>>(f: F, center: C64, radius: f64, target: C64, samples: usize) -> Result<i64> {
    let mut total = 0.0;
    let first = f(center + radius)? - target;
    let mut prev = first;
    for k in 1..=samples {
        let t = 2.0 * PI * k as f64 / samples as f64;
        let cur = if k == samples { first } else { f(center + C64::from_polar(radius, t))? - target };
        if cur == c(0.0, 0.0) {
            return Err(QrwdError::Domain("curve passes through the target".into()));
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Local degree of `map` at the centre of the disc of level `n`, counted on `|z - ih_n| = R_n/4`.
pub fn local_degree(map: &QrMap, n: i64) -> Result<i64> {
    let sq = map.square(n, 0).ok_or_else(|| QrwdError::Invalid(format!("no square at level {n}")))?;
    let centre_value = map.eval(sq.center)?;
    winding_number(|z| map.eval(z), sq.center, sq.r / 4.0, centre_value, 4096)
}

/// Helper for tests and examples: `i·y`.
pub fn on_axis(y: f64) -> C64 {
    I * y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::{build_schedule, ScheduleMode};

    fn toy() -> (Schedule, ParameterSequence) {
        let s = build_schedule(0, ScheduleMode::Toy, Some(&ToyParams::new(vec![1, 2, 3]))).unwrap();
        let p = ParameterSequence::new(1, vec![c(0.5, 0.1), c(0.45, -0.05), c(0.55, 0.0)], c(0.5, 0.0));
        (s, p)
    }

    #[test]
    fn classification_examples() {
        let (s, p) = toy();
        let g = QrMap::even(&s, &p).unwrap();
        let l2 = s.toy_level(2).unwrap();
        assert_eq!(g.classify(c(1.0, 0.0)), RegionLabel::Outside);
        assert_eq!(g.classify(on_axis(l2.h)), RegionLabel::Disc { n: 2 });
        assert_eq!(g.classify(on_axis(l2.h + l2.r + 1e-3)), RegionLabel::Annulus { n: 2 });
        assert_eq!(g.classify(on_axis(-l2.h - l2.r)), RegionLabel::Disc { n: -2 });
    }

    #[test]
    fn evaluation_examples() {
        let (s, p) = toy();
        let g = QrMap::even(&s, &p).unwrap();
        assert!((g.eval(c(3.0, 0.0)).unwrap() - c(20.135_323_991_555_53, 0.0)).norm() < 1e-12);
        for n in 1..=3u32 {
            let h = s.toy_level(n).unwrap().h;
            assert!((g.eval(on_axis(h)).unwrap() - p.get(n)).norm() < 1e-15);
            assert!((g.eval(on_axis(-h)).unwrap() - p.get(n)).norm() < 1e-15);
        }
        let sym = QrMap::symmetric(&s, &p).unwrap();
        let h = s.toy_level(1).unwrap().h;
        assert!((sym.eval(on_axis(-h)).unwrap() - p.get(1).conj()).norm() < 1e-15);
        assert_eq!(sym.eval(c(2.5, 0.0)).unwrap().im, 0.0);
    }

    #[test]
    fn support_radius_examples() {
        assert!((support_inner_radius(1, 1.0) - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!((support_inner_radius(4, 1.0) - 0.771_105_412_703_970_4).abs() < 1e-15);
    }

    #[test]
    fn max_modulus_of_cosh() {
        let m = max_modulus(5.0, |z| Ok(z.cosh() * 2.0)).unwrap();
        assert!((m - 2.0 * 5f64.cosh()).abs() < 1e-12 * m);
        assert!(max_modulus(0.0, |z| Ok(z)).is_err());
    }

    #[test]
    fn multi_counts() {
        let p = ToyParams::new(vec![1, 1, 2, 2, 2, 3]);
        let s = build_multi_schedule(&p, 2).unwrap();
        let counts: Vec<u32> = (3..=6).map(|n| s.count(n)).collect();
        assert_eq!(counts, vec![1, 2, 2, 2]);
        let w = MultiParameters { first_index: 1, w: vec![], fill: c(0.5, 0.0) };
        let g = QrMap::multi(&s, &w).unwrap();
        let l = s.base.toy_level(4).unwrap();
        let z = on_axis(l.h + 6.0 * l.r);
        assert_eq!(g.classify(z), RegionLabel::DiscMulti { n: 4, j: 1 });
        assert!((g.eval(z).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(g.eval(c(2.0, 0.0)).unwrap(), c(2.0, 0.0).cosh() * 2.0);
    }
}
