//! Linear interpolation between two curves with a certified Beltrami bound.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::patch::{Curve, Wirtinger};
use super::piece::{QrPiece, Region};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, hyperbolic_distance_h, mobius_m, Rectangle, C64, I};

/// Parameters checked when validating a curve pair.
pub const VALIDATION_SAMPLES: usize = 1000;

/// Two curves on `[0, t0]`; each [`Curve`] is stored on `[0, 1]` and rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePair {
    pub gamma1: Curve,
    pub gamma2: Curve,
    pub t0: f64,
}

impl CurvePair {
    pub fn new(gamma1: Curve, gamma2: Curve, t0: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(QrwdError::Invalid(format!("t0 must be positive, got {t0}")));
        }
        Ok(CurvePair { gamma1, gamma2, t0 })
    }

    pub fn point(&self, j: usize, t: f64) -> C64 {
        self.curve(j).eval(t / self.t0)
    }

    pub fn velocity(&self, j: usize, t: f64) -> C64 {
        self.curve(j).deriv(t / self.t0) / self.t0
    }

    fn curve(&self, j: usize) -> &Curve {
        if j == 1 {
            &self.gamma1
        } else {
            &self.gamma2
        }
    }

    fn sample_ts(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=VALIDATION_SAMPLES).map(move |k| self.t0 * k as f64 / VALIDATION_SAMPLES as f64)
    }

    /// `(θ, v_min, v_max, l_min, l_max)` measured on the validation samples.
    pub fn measured_constants(&self) -> (f64, f64, f64, f64, f64) {
        let (mut theta, mut vmin, mut vmax, mut lmin, mut lmax) = (0.0f64, f64::MAX, 0.0f64, f64::MAX, 0.0f64);
        for t in self.sample_ts() {
            let gap = self.point(2, t) - self.point(1, t);
            lmin = lmin.min(gap.norm());
            lmax = lmax.max(gap.norm());
            for j in [1, 2] {
                let v = self.velocity(j, t);
                vmin = vmin.min(v.norm());
                vmax = vmax.max(v.norm());
                theta = theta.max(((v / gap).arg() - FRAC_PI_2).abs());
            }
        }
        (theta, vmin, vmax, lmin, lmax)
    }
}

/// `(s0, r)` from the sector and size bounds on `γ_j' / (γ2 - γ1)`.
pub fn theorem_constants(theta: f64, v_min: f64, v_max: f64, l_min: f64, l_max: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(QrwdError::OutOfRange(format!("theta must lie in (0, pi/2), got {theta}")));
    }
    if !(v_min > 0.0 && l_min > 0.0 && v_min <= v_max && l_min <= l_max) {
        return Err(QrwdError::Invalid(format!(
            "need 0 < v_min <= v_max and 0 < l_min <= l_max, got v = [{v_min}, {v_max}], l = [{l_min}, {l_max}]"
        )));
    }
    let s0 = (l_min * l_max / (v_min * v_max)).sqrt();
    let q = C64::from_polar(s0 * v_max / l_min, theta);
    let r = 2.0 * ((q - 1.0) / (q + 1.0)).norm().atanh();
    Ok((s0, r))
}

/// `Φ(s, t) = (1 - s/s0)·γ1(t) + (s/s0)·γ2(t)` on `[0, s0] × [0, t0]`, read as `z = s + it`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationMap {
    pub pair: CurvePair,
    pub s0: f64,
    /// Sampled enclosing hyperbolic radius plus a 5% margin.
    pub certified_r: f64,
}

/// Margin applied to the sampled radius.
const RADIUS_MARGIN: f64 = 1.05;

pub fn build_linear_interp(pair: CurvePair, s0: f64) -> Result<InterpolationMap> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(QrwdError::Invalid(format!("s0 must be positive, got {s0}")));
    }
    let mut r = 0.0f64;
    for t in pair.sample_ts() {
        let gap = pair.point(2, t) - pair.point(1, t);
        let scale = pair.point(1, t).norm().max(pair.point(2, t).norm()).max(1.0);
        if gap.norm() <= 1e-12 * scale {
            return Err(QrwdError::Constructive(format!("curves meet at t = {t}")));
        }
        for j in [1, 2] {
            let v = pair.velocity(j, t);
            if v.norm() == 0.0 {
                return Err(QrwdError::Constructive(format!("gamma{j}' vanishes at t = {t}")));
            }
            let q = v * s0 / gap;
            if !(q.im > 0.0) {
                return Err(QrwdError::Constructive(format!(
                    "s0 gamma{j}'/(gamma2 - gamma1) = {q} leaves the upper half-plane at t = {t}"
                )));
            }
            r = r.max(hyperbolic_distance_h(q, I)?);
        }
    }
    Ok(InterpolationMap { pair, s0, certified_r: RADIUS_MARGIN * r })
}

impl InterpolationMap {
    pub fn eval_st(&self, s: f64, t: f64) -> C64 {
        let lam = s / self.s0;
        self.pair.point(1, t) * (1.0 - lam) + self.pair.point(2, t) * lam
    }

    pub fn wirtinger_st(&self, s: f64, t: f64) -> Wirtinger {
        let lam = s / self.s0;
        let ds = (self.pair.point(2, t) - self.pair.point(1, t)) / self.s0;
        let dt = self.pair.velocity(1, t) * (1.0 - lam) + self.pair.velocity(2, t) * lam;
        Wirtinger::from_partials(ds, dt)
    }

    /// `μ_Φ = -M(∂_tΦ / ∂_sΦ)`.
    pub fn mu_exact(&self, s: f64, t: f64) -> Result<C64> {
        let w = self.wirtinger_st(s, t);
        let ds = w.dz + w.dzb;
        let dt = (w.dz - w.dzb) * I;
        Ok(-mobius_m(dt / ds)?)
    }

    /// `tanh(r/2)` for the certified radius.
    pub fn mu_bound(&self) -> f64 {
        (self.certified_r / 2.0).tanh()
    }
}

impl QrPiece for InterpolationMap {
    fn name(&self) -> String {
        "linear_interp".into()
    }

    fn domain(&self) -> Region {
        Region::Rect(Rectangle {
            center: c(self.s0 / 2.0, self.pair.t0 / 2.0),
            half_width: self.s0 / 2.0,
            half_height: self.pair.t0 / 2.0,
        })
    }

    fn eval_branch(&self, z: C64) -> Result<(C64, u32)> {
        Ok((self.eval_st(z.re, z.im), 0))
    }

    fn declared_bound(&self) -> f64 {
        self.certified_r.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::patch::arc;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn constants_examples() {
        let (s0, r) = theorem_constants(1e-12, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(s0, 1.0);
        assert!(r < 1e-11);
        let (s0, r) = theorem_constants(FRAC_PI_4, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(s0, 1.0);
        // 2 artanh(tan(pi/8)) = asinh(1), mpmath
        assert!((r - 0.881_373_587_019_543).abs() < 1e-14);
        let q = C64::from_polar(1.0, FRAC_PI_2 + FRAC_PI_4);
        assert!((hyperbolic_distance_h(q, I).unwrap() - r).abs() < 1e-14);
        let (s0, r) = theorem_constants(FRAC_PI_4, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert!((s0 - 0.5).abs() < 1e-15);
        assert!((r - 0.881_373_587_019_543).abs() < 1e-14);
        assert!(theorem_constants(FRAC_PI_2, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(theorem_constants(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn identity_and_affine_cases() {
        for (right, s0) in [(1.0, 1.0), (2.0, 2.0)] {
            let pair = CurvePair::new(
                Curve::segment(c(0.0, 0.0), c(0.0, 1.0)),
                Curve::segment(c(right, 0.0), c(right, 1.0)),
                1.0,
            )
            .unwrap();
            let m = build_linear_interp(pair, s0).unwrap();
            assert!(m.certified_r < 1e-12);
            let z = m.eval_st(0.3 * s0, 0.6);
            assert!((z - c(0.3 * s0, 0.6)).norm() < 1e-15);
            assert!(m.mu_exact(0.5, 0.5).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn concentric_arcs_respect_the_bound() {
        let pair = CurvePair::new(arc(c(0.0, 0.0), 1.0, 0.0, FRAC_PI_2), arc(c(0.0, 0.0), 2.0, 0.0, FRAC_PI_2), FRAC_PI_2)
            .unwrap();
        let (theta, vmin, vmax, lmin, lmax) = pair.measured_constants();
        assert!(theta < 1e-12);
        assert!((vmin - 1.0).abs() < 1e-12 && (vmax - 2.0).abs() < 1e-12);
        assert!((lmin - 1.0).abs() < 1e-12 && (lmax - 1.0).abs() < 1e-12);
        let (s0, r) = theorem_constants(1e-9, vmin, vmax, lmin, lmax).unwrap();
        assert!((s0 - 0.5f64.sqrt()).abs() < 1e-12);
        let m = build_linear_interp(pair, s0).unwrap();
        let bound = (r / 2.0).tanh();
        for k in 0..=20 {
            for l in 0..=20 {
                let mu = m.mu_exact(s0 * k as f64 / 20.0, FRAC_PI_2 * l as f64 / 20.0).unwrap();
                assert!(mu.norm() <= bound + 1e-12);
            }
        }
        assert!(m.mu_bound() >= bound * (1.0 - 1e-9));
    }

    #[test]
    fn crossing_curves_are_rejected() {
        let pair = CurvePair::new(
            Curve::segment(c(0.0, 0.0), c(1.0, 1.0)),
            Curve::segment(c(1.0, 0.0), c(0.0, 1.0)),
            1.0,
        )
        .unwrap();
        assert!(matches!(build_linear_interp(pair, 1.0), Err(QrwdError::Constructive(_))));
        // reversed orientation puts the ratio in the lower half-plane
        let pair = CurvePair::new(
            Curve::segment(c(1.0, 0.0), c(1.0, 1.0)),
            Curve::segment(c(0.0, 0.0), c(0.0, 1.0)),
            PI,
        )
        .unwrap();
        assert!(matches!(build_linear_interp(pair, 1.0), Err(QrwdError::Constructive(_))));
    }
}
