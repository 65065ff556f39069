//! Generators shared by the property tests and the acceptance runner.
#![allow(dead_code, unused_imports)]

use qrwd::interpolation::{Curve, CurvePair};
use qrwd::numerics::c;
use rand::Rng;

/// Admissible pairs: images of two vertical lines under `2cosh`, or two
/// slightly tilted, nearly parallel segments.
pub fn random_curve_pair<R: Rng>(rng: &mut R, k: usize) -> CurvePair {
    if k % 2 == 0 {
        let x1 = rng.gen_range(0.5..2.0);
        let x2 = x1 + rng.gen_range(0.3..1.0);
        let y0 = rng.gen_range(-3.0..3.0);
        let y1 = y0 + rng.gen_range(0.3..1.5);
        CurvePair::new(Curve::cosh(c(x1, y0), c(x1, y1)), Curve::cosh(c(x2, y0), c(x2, y1)), y1 - y0).unwrap()
    } else {
        let base = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let width = rng.gen_range(0.5..2.0);
        let height = rng.gen_range(0.5..2.0);
        let tilt = |r: &mut R| r.gen_range(-0.2..0.2);
        let g1 = Curve::segment(base, base + c(tilt(rng), height));
        let g2 = Curve::segment(base + c(width, tilt(rng)), base + c(width + tilt(rng), height + tilt(rng)));
        CurvePair::new(g1, g2, rng.gen_range(0.5..2.0)).unwrap()
    }
}

pub use qrwd::estimates::random_pole_case;

/// Case configurations at `H = 6`, `η = 1/4`.
pub fn random_case_config<R: Rng>(
    rng: &mut R,
    near: bool,
) -> (qrwd::numerics::C64, qrwd::numerics::C64, qrwd::numerics::Disc) {
    qrwd::estimates::random_case_config(rng, near, 6.0, 0.25)
}

/// The bundled toy instance.
pub fn fixture_config() -> qrwd::dynamics::InstanceConfig {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy_instance.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
