use std::f64::consts::PI;

use proptest::prelude::*;
use qrwd::base_map::{
    build_schedule, critical_orbit, ellipse_boundary_residual, g_eval, g_inverse_branch, on_slit, q_rect,
    reference_orbit, OrbitLog, ScheduleMode, ToyParams,
};
use qrwd::numerics::{c, Tower};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn g_is_even_and_real_on_ten_thousand_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let z = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let w = g_eval(z).unwrap();
        assert_eq!(g_eval(-z).unwrap(), w);
        assert_eq!(g_eval(z.conj()).unwrap(), w.conj());
    }
}

#[test]
fn inverse_branch_round_trips_on_ten_thousand_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut n = 0;
    while n < 10_000 {
        let scale = 10f64.powf(rng.gen_range(-1.0..6.0));
        let w = c(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale);
        if on_slit(w) || w.im.abs() < 1e-9 * w.norm() && w.re < 2.0 {
            continue;
        }
        let z = g_inverse_branch(w).unwrap();
        assert!(z.re > 0.0 && z.im.abs() < PI, "{w} -> {z} outside S+");
        let back = g_eval(z).unwrap();
        assert!((back - w).norm() <= 1e-12 * w.norm().max(1.0), "{w} -> {z} -> {back}");
        n += 1;
    }
}

#[test]
fn branch_rejects_the_slit() {
    for x in [-5.0, 0.0, 1.9, 2.0] {
        assert!(g_inverse_branch(c(x, 0.0)).is_err());
    }
}

proptest! {
    #[test]
    fn square_boundary_lands_on_ellipses(x in 2.0f64..20.0, t in 0.0f64..1.0, side in 0usize..4) {
        let q = q_rect(x);
        let samples = q.boundary_samples(64);
        let z = samples[side * 64 + (t * 63.0) as usize];
        prop_assert!(ellipse_boundary_residual(x, z).unwrap() < 1e-9);
    }

    #[test]
    fn g_pushes_reals_forward(x in 2.0f64..700.0) {
        prop_assert!(g_eval(c(x, 0.0)).unwrap().re - x > 1.0);
    }
}

#[test]
fn critical_orbit_interleaves_reference_orbit() {
    let xs = reference_orbit(7).unwrap();
    let vs = critical_orbit(7).unwrap();
    let one = Tower::from_f64(1.0);
    for n in 3..=6 {
        assert!(vs[n + 1].sub(&xs[n]).total_cmp(&one).is_gt(), "v_{} - x_{n}", n + 1);
        assert!(xs[n].sub(&vs[n]).total_cmp(&one).is_gt(), "x_{n} - v_{n}");
    }
}

#[test]
fn true_schedule_squares_are_separated() {
    let s = build_schedule(11, ScheduleMode::TrueScale, None).unwrap();
    let two_pi = OrbitLog::of_value(2.0 * PI).unwrap();
    for n in 3..=10 {
        let (e, e1) = (s.entry(n).unwrap(), s.entry(n + 1).unwrap());
        let top = e.h.add(&e.d.mul(&two_pi));
        let bottom = e1.h.sub(&e1.d.mul(&two_pi)).unwrap();
        assert!(top < bottom, "levels {n} and {}", n + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn toy_schedules_are_disjoint(d in prop::collection::vec(1u32..12, 1..6), gap in 1.0f64..3.0) {
        let mut p = ToyParams::new(d.clone());
        p.gap_factor = gap;
        let s = build_schedule(0, ScheduleMode::Toy, Some(&p)).unwrap();
        let levels = s.toy_levels().unwrap();
        for (k, (_, l)) in levels.iter().enumerate() {
            prop_assert_eq!((l.h / (2.0 * PI)).round() * 2.0 * PI, l.h);
            prop_assert!((l.r - (l.d as f64 - 1.0 / 3.0) * PI).abs() < 1e-12);
            prop_assert!(l.h - l.e_plus.half_height > 0.0);
            if let Some((_, next)) = levels.get(k + 1) {
                let gap_now = (next.h - next.e_plus.half_height) - (l.h + l.e_plus.half_height);
                prop_assert!(gap_now > 0.0);
            }
        }
    }
}
