//! Integral bounds behind the distortion estimates for `φ`, and the
//! log-scale bookkeeping of inner radii and inclusions.

mod ledger;
mod quad;
mod sampling;

pub use ledger::{
    inclusion_check, inclusion_sweep, inner_radius_log, paper_family_separation, InclusionRow, InclusionSweep,
    SeparationRow,
};
pub use quad::{pole_integral, REL_TOL};
pub use sampling::{random_case_config, random_pole_case};

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QrwdError, Result};
use crate::numerics::{Disc, C64};

pub const DEFAULT_DELTA1: f64 = 0.1;
pub const DEFAULT_C: f64 = 1.0;
/// Boundary samples per disc when estimating the separation constant.
pub const SEPARATION_SAMPLES: usize = 256;

/// `∬_{D(alpha, r)} dx dy / |z - beta|`; never exceeds `2πr`.
pub fn disc_pole_integral(alpha: C64, r: f64, beta: C64) -> f64 {
    pole_integral(alpha, r, 1.0, &[beta])
}

/// Support discs `B_m` of a Beltrami coefficient bounded by `(K-1)/(K+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscFamily {
    pub discs: Vec<Disc>,
    #[serde(rename = "K")]
    pub k: f64,
}

/// The two opaque constants of the key inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyConstants {
    pub delta1: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl Default for KeyConstants {
    fn default() -> Self {
        KeyConstants { delta1: DEFAULT_DELTA1, c: DEFAULT_C }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyInequalityReport {
    pub delta1: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// Bare integrals, one per disc, before the `C(K-1)` factor.
    pub per_disc: Vec<f64>,
    pub total: f64,
}

/// `∬_B |β-α| dx dy / |(z-α)(z-β)(z-γ)|` over one disc.
pub fn disc_key_integral(alpha: C64, beta: C64, gamma: C64, disc: &Disc) -> f64 {
    pole_integral(disc.center, disc.radius, (beta - alpha).norm(), &[alpha, beta, gamma])
}

/// `C(K-1) Σ_m ∬_{B_m} |β-α| / |(z-α)(z-β)(z-γ)|`, requiring `0 < |γ-α| <= δ₁|β-α|`.
pub fn key_inequality_rhs(
    alpha: C64,
    beta: C64,
    gamma: C64,
    family: &DiscFamily,
    consts: KeyConstants,
) -> Result<KeyInequalityReport> {
    let near = (gamma - alpha).norm();
    if !(near > 0.0 && near <= consts.delta1 * (beta - alpha).norm()) {
        return Err(QrwdError::Precondition(format!(
            "need 0 < |gamma - alpha| <= delta1 |beta - alpha|, got {near} vs {} * {}",
            consts.delta1,
            (beta - alpha).norm()
        )));
    }
    let per_disc: Vec<f64> = family.discs.par_iter().map(|d| disc_key_integral(alpha, beta, gamma, d)).collect();
    let total = consts.c * (family.k - 1.0) * per_disc.iter().sum::<f64>();
    Ok(KeyInequalityReport { delta1: consts.delta1, c: consts.c, k: family.k, per_disc, total })
}

/// Which half of the dichotomy a disc falls in when `α = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyCase {
    /// `β` close to the disc centre.
    Near,
    Far,
}

/// Threshold `(1 + Hη)/(H - 1)` on `|β - ζ| / |ζ|`.
pub fn case_threshold(h: f64, eta: f64) -> f64 {
    (1.0 + h * eta) / (h - 1.0)
}

pub fn key_case(beta: C64, disc: &Disc, h: f64, eta: f64) -> KeyCase {
    if (beta - disc.center).norm() <= case_threshold(h, eta) * disc.center.norm() {
        KeyCase::Near
    } else {
        KeyCase::Far
    }
}

/// Closed-form bound on the per-disc integral (with `α = 0`) in each case.
///
/// Valid for `H >= 6`, `r/|ζ| <= η <= 1/4`, `|ζ| >= 4/δ₁` and `|γ| <= 1/δ₁`.
pub fn case_bound(case: KeyCase, disc: &Disc, h: f64, eta: f64) -> f64 {
    let (r, z) = (disc.radius, disc.center.norm());
    match case {
        KeyCase::Near => 8.0 * h * (1.0 + eta) / (3.0 * (h - 1.0)) * 2.0 * PI * r / z,
        KeyCase::Far => 16.0 * PI * h / 3.0 * (r / z).powi(2),
    }
}

/// Bound for a disc away from the one holding `ζ` and `ζ_n`, given separation constant `c1`.
pub fn separated_disc_bound(disc: &Disc, c1: f64) -> f64 {
    2.0 * PI / (0.75f64.powf(1.5) * c1 * c1) * disc.radius / disc.center.norm()
}

/// Bound for a disc seen from `ζ` under an angle gap `theta`, with `γ = (1+δ)ζ`.
pub fn angular_gap_bound(disc: &Disc, theta: f64, delta: f64) -> f64 {
    let (r, z) = (disc.radius, disc.center.norm());
    1.0 / (2.0 * (1.0 - theta.cos()) * (1.0 + delta).sqrt()) * 2.0 * PI * r * r / (0.75 * z).powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub delta1: f64,
    /// Every `|ζ_m| >= 4`.
    pub centers_ok: bool,
    /// Every `r_m/|ζ_m| <= min(1/4, δ₁)`.
    pub ratios_ok: bool,
    /// Running sums of `r_m/|ζ_m|`.
    pub partial_sums: Vec<f64>,
    /// Sampled `min |z - z'| / sqrt(|z z'|)` over distinct discs; `None` below two discs.
    pub c1: Option<f64>,
    pub flags: Vec<String>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.centers_ok && self.ratios_ok
    }
}

pub fn check_assumption(family: &DiscFamily, delta1: f64) -> AssumptionReport {
    let cap = delta1.min(0.25);
    let mut flags = Vec::new();
    let mut partial_sums = Vec::with_capacity(family.discs.len());
    let mut acc = 0.0;
    for (m, d) in family.discs.iter().enumerate() {
        let z = d.center.norm();
        if z < 4.0 {
            flags.push(format!("disc {m}: |center| = {z} < 4"));
        }
        let ratio = d.radius / z;
        if ratio > cap {
            flags.push(format!("disc {m}: r/|center| = {ratio} > {cap}"));
        }
        acc += ratio;
        partial_sums.push(acc);
    }
    let centers_ok = family.discs.iter().all(|d| d.center.norm() >= 4.0);
    let ratios_ok = family.discs.iter().all(|d| d.radius / d.center.norm() <= cap);
    let samples: Vec<Vec<C64>> = family.discs.iter().map(|d| d.boundary_samples(SEPARATION_SAMPLES)).collect();
    let mut c1: Option<f64> = None;
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            let mut lo = f64::INFINITY;
            for z in &samples[a] {
                for w in &samples[b] {
                    lo = lo.min((z - w).norm() / (z.norm() * w.norm()).sqrt());
                }
            }
            c1 = Some(c1.map_or(lo, |v| v.min(lo)));
        }
    }
    AssumptionReport { delta1, centers_ok, ratios_ok, partial_sums, c1, flags }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn disc(re: f64, im: f64, r: f64) -> Disc {
        Disc::new(c(re, im), r).unwrap()
    }

    #[test]
    fn simple_pole_examples() {
        assert!((disc_pole_integral(c(0.0, 0.0), 1.0, c(0.0, 0.0)) - 2.0 * PI).abs() < 1e-9);
        // mpmath: ∫ 2 sqrt(1 - 9 sin²θ) dθ over |θ| <= asin(1/3)
        let v = disc_pole_integral(c(3.0, 0.0), 1.0, c(0.0, 0.0));
        assert!((v - 1.062_385_630_549_103_3).abs() < 1e-8, "{v}");
        let v = disc_pole_integral(c(0.5, 0.0), 1.0, c(0.0, 0.0));
        assert!(v < 2.0 * PI);
    }

    #[test]
    fn key_inequality_examples() {
        let consts = KeyConstants::default();
        let empty = DiscFamily { discs: vec![], k: 2.0 };
        let rep = key_inequality_rhs(c(0.0, 0.0), c(1.0, 0.0), c(0.05, 0.0), &empty, consts).unwrap();
        assert_eq!(rep.total, 0.0);
        let far = DiscFamily { discs: vec![disc(100.0, 0.0, 1.0)], k: 3.0 };
        let rep = key_inequality_rhs(c(0.0, 0.0), c(1.0, 0.0), c(0.05, 0.0), &far, consts).unwrap();
        let mid = 2.0 * PI / (100.0 * 99.0 * 99.95);
        assert!((rep.total / mid - 1.0).abs() < 0.03, "{} vs {mid}", rep.total);
        assert!(key_inequality_rhs(c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), &far, consts).is_err());
        assert!(key_inequality_rhs(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), &far, consts).is_err());
        let js = serde_json::to_value(&rep).unwrap();
        assert!(js.get("per_disc").is_some() && js.get("delta1").is_some() && js.get("C").is_some());
    }

    #[test]
    fn near_case_under_bound() {
        let d = disc(0.0, 50.0, 5.0);
        let beta = c(1.0, 51.0);
        assert_eq!(key_case(beta, &d, 6.0, 0.25), KeyCase::Near);
        let v = disc_key_integral(c(0.0, 0.0), beta, c(3.0, 2.0), &d);
        assert!(v <= case_bound(KeyCase::Near, &d, 6.0, 0.25));
    }

    #[test]
    fn assumption_examples() {
        let fam = DiscFamily { discs: vec![disc(0.0, 100.0, 1.0), disc(0.0, 10000.0, 1.0)], k: 2.0 };
        let rep = check_assumption(&fam, 0.1);
        assert!(rep.passed());
        // exact minimum at 101i, 9999i; both are sample points
        let exact = 9898.0 / (9999.0f64 * 101.0).sqrt();
        assert!((rep.c1.unwrap() - exact).abs() < 1e-6 * exact, "{:?}", rep.c1);
        let bad = DiscFamily { discs: vec![disc(10.0, 0.0, 3.0)], k: 2.0 };
        let rep = check_assumption(&bad, 0.5);
        assert!(!rep.ratios_ok && rep.centers_ok);
        assert_eq!(rep.flags.len(), 1);
        assert!(rep.c1.is_none());
    }
}
