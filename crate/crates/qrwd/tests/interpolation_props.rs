use std::f64::consts::PI;

use qrwd::interpolation::{
    build_g, build_linear_interp, build_rho, disc_radius, estimate_dilatation, theorem_constants, QrPiece,
};
use qrwd::numerics::{c, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

#[test]
fn twenty_random_pairs_respect_the_certified_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let pair = common::random_curve_pair(&mut rng, k);
        let (theta, vmin, vmax, lmin, lmax) = pair.measured_constants();
        let (s0, r) = theorem_constants(theta.max(1e-12), vmin, vmax, lmin, lmax).unwrap();
        let map = build_linear_interp(pair, s0).unwrap();
        let bound = (r / 2.0).tanh();
        for a in 0..=40 {
            for b in 0..=40 {
                let mu = map.mu_exact(s0 * a as f64 / 40.0, pair.t0 * b as f64 / 40.0).unwrap();
                assert!(mu.norm() <= bound + 1e-6, "pair {k}: |mu| = {} > {bound}", mu.norm());
            }
        }
    }
}

#[test]
fn g_symmetries_on_ten_thousand_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [1, 2, 5] {
        let g = build_g(d, disc_radius(d)).unwrap();
        for _ in 0..10_000 / 3 {
            let z = c(rng.gen_range(-g.side..g.side), rng.gen_range(-g.side..g.side));
            let w = g.eval(z).unwrap();
            let tol = 1e-12 * w.norm().max(1.0);
            assert!((g.eval(-z).unwrap() - w).norm() <= tol);
            assert!((g.eval(z.conj()).unwrap() - w.conj()).norm() <= tol);
        }
    }
}

#[test]
fn g_boundary_agreement() {
    for d in 1..=8u32 {
        let g = build_g(d, disc_radius(d)).unwrap();
        let (l, r) = (g.side, g.r);
        let cosh2 = |z: C64| z.cosh() * 2.0;
        for k in 0..=400 {
            let u = -l + 2.0 * l * k as f64 / 400.0;
            for z in [c(u, l), c(u, -l), c(l, u), c(-l, u)] {
                let want = cosh2(z);
                assert!((g.eval(z).unwrap() - want).norm() <= 1e-9 * want.norm(), "d = {d}, z = {z}");
            }
            let y = r + (l - r) * k as f64 / 400.0;
            for z in [c(0.0, y), c(0.0, -y)] {
                let want = cosh2(z);
                assert!((g.eval(z).unwrap() - want).norm() <= 1e-9 * want.norm().max(1.0), "d = {d}, z = {z}");
            }
            let z = C64::from_polar(r * (k as f64 / 400.0), 2.0 * PI * k as f64 / 57.0);
            assert!((g.eval(z).unwrap() - (z / r).powi(2 * d as i32)).norm() <= 1e-12);
        }
    }
}

#[test]
fn g_is_continuous_and_bounded_for_small_degrees() {
    for d in [1, 2] {
        let g = build_g(d, disc_radius(d)).unwrap();
        let rep = estimate_dilatation(&g, 128).unwrap();
        assert!(rep.sup_k.is_finite() && rep.sup_k > 1.0);
        assert!(rep.sup_k <= g.declared_bound() * 1.05);
        assert!(rep.seam_jump < 1e-6 * (2.0 * g.side).cosh());
    }
}

#[test]
fn rho_is_injective_on_a_polar_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let w = C64::from_polar(rng.gen_range(0.0..0.74), rng.gen_range(-PI..PI));
        let rho = build_rho(w).unwrap();
        // images of radial segments stay on their own rays from the shifted centre outward
        let mut pts = Vec::new();
        for i in 0..24 {
            for j in 0..24 {
                let z = C64::from_polar(0.02 + 0.97 * i as f64 / 23.0, 2.0 * PI * j as f64 / 24.0);
                pts.push(rho.eval(z).unwrap());
            }
        }
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                assert!((pts[a] - pts[b]).norm() > 1e-6);
            }
        }
        let (_, jet, _) = rho.eval_jet(c(0.5, 0.0)).unwrap();
        assert!(jet.jacobian() > 0.0);
    }
}
