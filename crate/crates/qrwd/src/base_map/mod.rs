//! The model map `g(z) = 2cosh z`, its inverse branch onto the half strip
//! `S+ = {Re > 0, |Im| < π}`, the reference and critical orbits, and the
//! geometric checks that tie them together.

mod orbit_log;
mod schedule;

pub use orbit_log::OrbitLog;

pub use schedule::{
    build_schedule, toy_schedule_from_heights, verify_growth, GrowthReport, GrowthRow, Schedule, ScheduleEntry, ScheduleMode,
    ToyLevel, ToyParams,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{QrwdError, Result};
use crate::numerics::{c, Disc, EllipseRegion, Rectangle, Tower, C64};

/// Real part beyond which `2cosh` leaves the float range.
pub const G_OVERFLOW_RE: f64 = 700.0;
/// Largest orbit length accepted by [`reference_orbit`].
pub const MAX_ORBIT_LEN: usize = 64;

pub fn g_eval(z: C64) -> Result<C64> {
    if z.re.abs() > G_OVERFLOW_RE {
        return Err(QrwdError::Overflow(format!("2cosh at Re z = {}", z.re)));
    }
    Ok(2.0 * z.cosh())
}

/// `g'(z) = 2sinh z`.
pub fn g_prime(z: C64) -> Result<C64> {
    if z.re.abs() > G_OVERFLOW_RE {
        return Err(QrwdError::Overflow(format!("2sinh at Re z = {}", z.re)));
    }
    Ok(2.0 * z.sinh())
}

pub fn on_slit(z: C64) -> bool {
    z.im == 0.0 && z.re <= 2.0
}

/// Preimage of `z` under `g` in `S+`, defined off the slit `(-∞, 2]`.
pub fn g_inverse_branch(z: C64) -> Result<C64> {
    if on_slit(z) {
        return Err(QrwdError::Domain(format!("{z} lies on the slit (-inf, 2]")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(QrwdError::Domain(format!("non-finite argument {z}")));
    }
    let u = z / 2.0;
    let mut w = if u.norm() > 1e150 {
        // e^w dominates: 2cosh w = z up to e^{-2 Re w}.
        z.ln()
    } else {
        let s = (u * u - 1.0).sqrt();
        let (p, q) = (u + s, u - s);
        // The larger root has modulus >= 1, so its log has Re >= 0.
        if p.norm() >= q.norm() { p.ln() } else { q.ln() }
    };
    if w.re < 0.0 {
        w = -w;
    }
    if w.re < G_OVERFLOW_RE {
        let d = 2.0 * w.sinh();
        if d.norm() > 1e-8 {
            let step = (2.0 * w.cosh() - z) / d;
            let polished = w - step;
            if polished.re > 0.0 && polished.im.abs() < PI {
                w = polished;
            }
        }
    }
    Ok(w)
}

/// `(x_0, ..., x_{n_max})` with `x_0 = 1/2`, switching to towers past 700.
pub fn reference_orbit(n_max: usize) -> Result<Vec<Tower>> {
    real_orbit_towers(0.5, n_max)
}

/// Orbit of the critical point 0: `v_0 = 0, v_1 = 2, ...`.
pub fn critical_orbit(n_max: usize) -> Result<Vec<Tower>> {
    real_orbit_towers(0.0, n_max)
}

fn real_orbit_towers(x0: f64, n_max: usize) -> Result<Vec<Tower>> {
    if n_max > MAX_ORBIT_LEN {
        return Err(QrwdError::Precondition(format!("n_max = {n_max} exceeds {MAX_ORBIT_LEN}")));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut x = Tower::from_f64(x0);
    out.push(x);
    for _ in 0..n_max {
        x = match x.to_f64() {
            Some(v) if v < G_OVERFLOW_RE => Tower::from_f64(2.0 * v.cosh()),
            // log x' = x + log(1 + e^{-2x}); the correction is below 1e-34 here.
            _ => x.exp(),
        };
        out.push(x);
    }
    Ok(out)
}

/// `Q(x) = {|Re z - x| < 1, |Im z| < π}`.
pub fn q_rect(x: f64) -> Rectangle {
    Rectangle { center: c(x, 0.0), half_width: 1.0, half_height: PI }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringReport {
    pub x: f64,
    /// `2sinh(x+1) - 2e^x`
    pub outer_margin: f64,
    /// `e^x/2 - 2cosh(x-1)`
    pub inner_margin: f64,
    pub boundary_samples: usize,
    pub boundary_violations: usize,
    pub pass: bool,
}

/// Checks that `g(Q(x))` covers the annulus `e^x/2 < |z| < 2e^x` off `ℝ₋`.
pub fn check_rect_covering(x: f64) -> Result<CoveringReport> {
    if !(x > 1.0) {
        return Err(QrwdError::Precondition(format!("covering check needs x > 1, got {x}")));
    }
    let outer_margin = 2.0 * (x + 1.0).sinh() - 2.0 * x.exp();
    let inner_margin = 0.5 * x.exp() - 2.0 * (x - 1.0).cosh();
    let samples = q_rect(x).boundary_samples(256);
    let (lo, hi) = (0.5 * x.exp(), 2.0 * x.exp());
    let mut violations = 0;
    for z in &samples {
        let w = g_eval(*z)?;
        let r = w.norm();
        let on_negative_axis = w.re < 0.0 && w.im.abs() <= 1e-9 * r;
        if !(r >= hi || r <= lo || on_negative_axis) {
            violations += 1;
        }
    }
    Ok(CoveringReport {
        x,
        outer_margin,
        inner_margin,
        boundary_samples: samples.len(),
        boundary_violations: violations,
        pass: outer_margin > 0.0 && inner_margin > 0.0 && violations == 0,
    })
}

/// Bisects for the smallest `x` in `[lo, hi]` at which the covering
/// inequalities hold, assuming they fail at `lo` and hold at `hi`.
pub fn covering_crossover(mut lo: f64, mut hi: f64) -> f64 {
    let holds = |x: f64| {
        2.0 * (x + 1.0).sinh() > 2.0 * x.exp() && 0.5 * x.exp() > 2.0 * (x - 1.0).cosh()
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitClass {
    Escaping,
    Bounded,
    Undecided,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<C64>,
    pub classification: OrbitClass,
    pub escape_index: Option<usize>,
    /// Set when iteration stopped because the map could not be evaluated.
    pub flag: Option<String>,
}

/// Iterates a real map until it exceeds `bailout`.
pub fn real_orbit_classify(
    x0: f64,
    map: impl Fn(f64) -> f64,
    bailout: f64,
    max_iter: usize,
) -> Result<OrbitRecord> {
    if !(bailout > 10.0) {
        return Err(QrwdError::Precondition(format!("bailout must exceed 10, got {bailout}")));
    }
    let mut x = x0;
    let mut points = vec![c(x, 0.0)];
    for k in 1..=max_iter {
        x = map(x);
        points.push(c(x, 0.0));
        if !(x.abs() <= bailout) {
            return Ok(OrbitRecord {
                points,
                classification: OrbitClass::Escaping,
                escape_index: Some(k),
                flag: None,
            });
        }
    }
    Ok(OrbitRecord { points, classification: OrbitClass::Undecided, escape_index: None, flag: None })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialSegmentReport {
    pub m: usize,
    pub samples: usize,
    /// Largest `|g^{-M}(z) - 1/2|` over the boundary samples.
    pub max_distance: f64,
    pub target_radius: f64,
    /// `x_M - v_M`, compared against the Koebe radius `10^4`.
    pub orbit_gap: f64,
    pub koebe_radius: f64,
    pub koebe_inner_radius: f64,
    /// `2(R'/R) / (1 - (R'/R)^2)`
    pub distortion_bound: f64,
    pub distortion_within_target: bool,
    pub pass: bool,
}

/// Pulls `∂Q_M` back by `M` inverse-branch steps and checks it lands in
/// `D(1/2, 1/16)`, together with the Koebe side conditions.
pub fn initial_segment(m: usize, samples_per_side: usize) -> Result<InitialSegmentReport> {
    let xs = reference_orbit(m)?;
    let vs = critical_orbit(m)?;
    let (xm, vm) = match (xs[m].to_f64(), vs[m].to_f64()) {
        (Some(x), Some(v)) => (x, v),
        _ => {
            return Err(QrwdError::Precondition(format!("x_{m} is not representable as a float")))
        }
    };
    if m < 3 {
        return Err(QrwdError::Precondition(format!("initial segment needs M >= 3, got {m}")));
    }
    let target = Disc { center: c(0.5, 0.0), radius: 1.0 / 16.0 };
    let pts = q_rect(xm).boundary_samples(samples_per_side);
    let mut max_distance: f64 = 0.0;
    for z in &pts {
        let mut w = *z;
        for _ in 0..m {
            w = g_inverse_branch(w)?;
        }
        max_distance = max_distance.max((w - target.center).norm());
    }
    let koebe_radius = 1e4;
    let koebe_inner_radius = koebe_radius / 32.0;
    let ratio = koebe_inner_radius / koebe_radius;
    let distortion_bound = 2.0 * ratio / (1.0 - ratio * ratio);
    // The distortion bound is reported, not gated: with R' = R/32 it is
    // (1/16)(1024/1023), a hair above 1/16.
    let pass = max_distance < target.radius
        && xm - vm >= koebe_radius
        && koebe_inner_radius > (1.0 + PI).sqrt();
    Ok(InitialSegmentReport {
        m,
        samples: pts.len(),
        max_distance,
        target_radius: target.radius,
        orbit_gap: xm - vm,
        koebe_radius,
        koebe_inner_radius,
        distortion_bound,
        distortion_within_target: distortion_bound <= target.radius,
        pass,
    })
}

/// Residual of `g(z)` against the boundary of `E_{x±1}` or the negative axis,
/// whichever is closest.
pub fn ellipse_boundary_residual(x: f64, z: C64) -> Result<f64> {
    let w = g_eval(z)?;
    let outer = EllipseRegion::cosh_level(x + 1.0)?.residual(w).abs();
    let inner = EllipseRegion::cosh_level(x - 1.0)?.residual(w).abs();
    let axis = if w.re <= 0.0 { w.im.abs() / w.norm().max(1.0) } else { f64::INFINITY };
    Ok(outer.min(inner).min(axis))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_examples() {
        assert_eq!(g_eval(c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        assert!((g_eval(c(0.0, PI)).unwrap() - c(-2.0, 0.0)).norm() < 1e-15);
        // 2cosh(1/2), mpmath
        assert!((g_eval(c(0.5, 0.0)).unwrap().re - 2.255_251_930_412_761_6).abs() < 1e-15);
        assert!(matches!(g_eval(c(700.5, 0.0)), Err(QrwdError::Overflow(_))));
    }

    #[test]
    fn inverse_examples() {
        let z = c(1.0, 0.3);
        let w = g_inverse_branch(g_eval(z).unwrap()).unwrap();
        assert!((w - z).norm() < 1e-14);
        let w = g_inverse_branch(c(2.0 * 5f64.cosh(), 0.0)).unwrap();
        assert!((w - c(5.0, 0.0)).norm() < 1e-14);
        // mpmath findroot of 2cosh w = 10i
        let w = g_inverse_branch(c(0.0, 10.0)).unwrap();
        assert!((w - c(2.312_438_341_272_752_6, std::f64::consts::FRAC_PI_2)).norm() < 1e-14);
        assert!(g_inverse_branch(c(-5.0, 0.0)).is_err());
        assert!(g_inverse_branch(c(2.0, 0.0)).is_err());
        assert!(g_inverse_branch(c(1.0, 1e-300)).is_ok());
    }

    #[test]
    fn reference_orbit_values() {
        let xs = reference_orbit(5).unwrap();
        assert_eq!(xs[0].to_f64(), Some(0.5));
        // 60-digit mpmath iteration of 2cosh from 1/2
        let want = [2.255_251_930_412_761_6, 9.642_542_969_377_998, 15_406.472_211_583_693];
        for (k, w) in want.iter().enumerate() {
            let got = xs[k + 1].to_f64().unwrap();
            assert!((got - w).abs() <= 1e-12 * w, "x_{} = {got}", k + 1);
        }
        assert!((xs[4].ln_f64().unwrap() - 15_406.472_211_583_693).abs() < 1e-9);
        assert_eq!(xs[5].height(), 2);
        assert!(reference_orbit(65).is_err());
    }

    #[test]
    fn covering_examples() {
        assert!(check_rect_covering(5.0 / 3.0).unwrap().pass);
        assert!(check_rect_covering(10.0).unwrap().pass);
        // Bisection once, frozen: the inner inequality e^x/2 > 2cosh(x-1)
        // fails below this (mpmath root 1.51202022438199992...).
        let xc = covering_crossover(1.01, 5.0 / 3.0);
        assert!((xc - 1.512_020_224_382).abs() < 1e-9);
        let below = check_rect_covering(1.512).unwrap();
        assert!(!below.pass && below.inner_margin < 0.0);
        assert!(check_rect_covering(1.0).is_err());
    }

    #[test]
    fn real_orbits_escape() {
        let g = |x: f64| 2.0 * x.cosh();
        let r = real_orbit_classify(0.5, g, 1e6, 10).unwrap();
        assert_eq!(r.classification, OrbitClass::Escaping);
        assert!(r.points.windows(2).skip(1).all(|p| p[1].re > p[0].re));
        let r = real_orbit_classify(-3.0, g, 1e6, 10).unwrap();
        assert_eq!(r.classification, OrbitClass::Escaping);
        let r = real_orbit_classify(0.0, g, 1e6, 10).unwrap();
        assert_eq!(r.points[1].re, 2.0);
        // 2cosh 2, mpmath
        assert!((r.points[2].re - 7.524_391_382_167_263).abs() < 1e-13);
        assert!(real_orbit_classify(0.0, g, 5.0, 10).is_err());
    }

    #[test]
    fn initial_segment_at_m3() {
        let rep = initial_segment(3, 250).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.koebe_inner_radius > (1.0 + PI).sqrt());
        assert!(rep.max_distance < 1e-4);
        assert!((rep.distortion_bound - 1024.0 / 1023.0 / 16.0).abs() < 1e-15);
        assert!(!rep.distortion_within_target);
        assert!(initial_segment(4, 10).is_err());
    }
}
