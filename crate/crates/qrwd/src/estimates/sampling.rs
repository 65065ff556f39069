//! Seeded generators for the randomized estimate suites.

use rand::Rng;

use super::case_threshold;
use crate::numerics::{Disc, C64};

/// Disc centre, radius and pole for the simple-pole bound; a third of the
/// poles sit inside the disc.
pub fn random_pole_case<R: Rng>(rng: &mut R) -> (C64, f64, C64) {
    let alpha = C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let r = rng.gen_range(0.1..3.0);
    let spread = if rng.gen_bool(1.0 / 3.0) { r } else { 4.0 * r };
    let beta = alpha + C64::from_polar(rng.gen_range(0.0..spread), rng.gen_range(0.0..6.3));
    (alpha, r, beta)
}

/// `(β, γ, B)` with `α = 0` inside the hypotheses of the two-case bound
/// at height `h` and margin `eta`; `near` picks the case.
pub fn random_case_config<R: Rng>(rng: &mut R, near: bool, h: f64, eta: f64) -> (C64, C64, Disc) {
    let zeta = C64::from_polar(rng.gen_range(40.0..400.0), rng.gen_range(0.0..6.3));
    let r = rng.gen_range(0.01..1.0) * 0.25 * zeta.norm();
    let threshold = case_threshold(h, eta);
    let s = if near { rng.gen_range(0.0..threshold) } else { rng.gen_range(threshold * 1.001..3.0) };
    let mut beta = zeta + C64::from_polar(s * zeta.norm(), rng.gen_range(0.0..6.3));
    if beta.norm() < 1.0 {
        beta += 1.0;
    }
    let gmax = (0.1 * beta.norm()).min(10.0);
    let gamma = C64::from_polar(rng.gen_range(0.01..1.0) * gmax, rng.gen_range(0.0..6.3));
    (beta, gamma, Disc { center: zeta, radius: r })
}
