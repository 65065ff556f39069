use std::f64::consts::PI;

use qrwd::estimates::{
    case_bound, disc_key_integral, disc_pole_integral, key_case, key_inequality_rhs, DiscFamily, KeyCase, KeyConstants,
};
use qrwd::numerics::{c, Disc, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

#[test]
fn simple_pole_bound_on_random_discs() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..100 {
        let (alpha, r, beta) = common::random_pole_case(&mut rng);
        let v = disc_pole_integral(alpha, r, beta);
        assert!(v <= 2.0 * PI * r * (1.0 + 1e-3), "alpha {alpha}, r {r}, beta {beta}: {v}");
        assert!(v > 0.0);
        let eq = disc_pole_integral(alpha, r, alpha);
        assert!((eq / (2.0 * PI * r) - 1.0).abs() < 1e-3);
    }
}

fn sample_family<R: Rng>(rng: &mut R) -> DiscFamily {
    let discs = (0..3)
        .map(|_| {
            let z = C64::from_polar(rng.gen_range(5.0..30.0), rng.gen_range(0.0..6.3));
            Disc::new(z, rng.gen_range(0.2..1.2)).unwrap()
        })
        .collect();
    DiscFamily { discs, k: 2.5 }
}

fn moved(f: &DiscFamily, m: impl Fn(C64) -> C64, scale: f64) -> DiscFamily {
    DiscFamily {
        discs: f.discs.iter().map(|d| Disc::new(m(d.center), d.radius * scale).unwrap()).collect(),
        k: f.k,
    }
}

#[test]
fn key_rhs_is_translation_and_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let consts = KeyConstants::default();
    for _ in 0..5 {
        let fam = sample_family(&mut rng);
        let alpha = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        // β inside one of the discs now and then exercises the pole handling
        let beta = if rng.gen_bool(0.5) { fam.discs[0].center } else { alpha + c(12.0, 3.0) };
        let gamma = alpha + (beta - alpha) * c(0.05, 0.03);
        let base = key_inequality_rhs(alpha, beta, gamma, &fam, consts).unwrap().total;
        let shift = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let t = key_inequality_rhs(alpha + shift, beta + shift, gamma + shift, &moved(&fam, |z| z + shift, 1.0), consts)
            .unwrap()
            .total;
        assert!((t / base - 1.0).abs() < 1e-9, "{t} vs {base}");
        for lam in [2.0, 10.0] {
            let s = key_inequality_rhs(alpha * lam, beta * lam, gamma * lam, &moved(&fam, |z| z * lam, lam), consts)
                .unwrap()
                .total;
            assert!((s / base - 1.0).abs() < 1e-9, "lambda {lam}: {s} vs {base}");
        }
    }
}

#[test]
fn per_disc_integrals_obey_case_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for near in [true, false] {
        for k in 0..50 {
            let (beta, gamma, disc) = common::random_case_config(&mut rng, near);
            let case = key_case(beta, &disc, 6.0, 0.25);
            assert_eq!(case == KeyCase::Near, near);
            let v = disc_key_integral(c(0.0, 0.0), beta, gamma, &disc);
            let bound = case_bound(case, &disc, 6.0, 0.25);
            assert!(v <= bound, "{case:?} #{k}: {v} > {bound}");
        }
    }
}
