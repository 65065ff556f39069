use qrwd::base_map::{g_eval, OrbitClass, ToyParams};
use qrwd::dynamics::{
    center_chain, containment_suite, escape_time_field, identity_landing, iterate_orbit, real_axis_deviation, shoot,
    verify_inclusions, InstanceConfig, ToyInstance, ESCAPE_INTERIOR,
};
use qrwd::numerics::{c, Rectangle, C64};
use qrwd::qr_map::ParameterSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

const TOL: f64 = 1e-10;

#[test]
fn zero_mu_reduces_to_the_base_map() {
    let mut cfg = common::fixture_config();
    cfg.mu_scale = 0.0;
    let rep = shoot(&cfg, &cfg.half_parameters(), TOL, 10).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 1);
    assert_eq!(rep.residual, 0.0);
    let inst = ToyInstance::build(&cfg, &rep.w_star).unwrap();
    for (n, l) in inst.schedule.toy_levels().unwrap() {
        let chain = center_chain(n, &inst).unwrap();
        assert!((chain.c_n - identity_landing(l.h).unwrap()).norm() < 1e-12);
    }
    assert!(containment_suite(&inst, 1.0).unwrap().pass);
}

#[test]
fn fixture_shoots_to_a_fixed_point() {
    let cfg = common::fixture_config();
    let rep = shoot(&cfg, &cfg.half_parameters(), TOL, 20).unwrap();
    assert!(rep.converged, "{rep:?}");
    assert!(rep.contraction < 0.5);
    assert!(rep.residual < TOL);
    // recomputed from scratch
    let inst = ToyInstance::build(&cfg, &rep.w_star).unwrap();
    for n in inst.first_index()..inst.last_index() {
        let cn = center_chain(n + 1, &inst).unwrap().c_n;
        assert!((inst.w.get(n) - cn).norm() < 2.0 * TOL);
    }
    let perturbed = ParameterSequence::constant(cfg.toy.first_index, c(0.55, 0.0));
    let other = shoot(&cfg, &perturbed, TOL, 20).unwrap();
    for n in inst.first_index()..inst.last_index() {
        assert!((other.w_star.get(n) - rep.w_star.get(n)).norm() < TOL);
    }
}

#[test]
fn chains_are_consistent() {
    let cfg = common::fixture_config();
    let inst = ToyInstance::build(&cfg, &cfg.half_parameters()).unwrap();
    for n in inst.first_index()..=inst.last_index() {
        let chain = center_chain(n, &inst).unwrap();
        assert!(chain.residual < 1e-9);
        let (_, again) = inst.pull_back(chain.start).unwrap();
        assert!((again[2] - chain.c_n).norm() < 1e-10);
        assert!(inst.level(n).unwrap().q.contains_closed(chain.hat_c[0]));
    }
    let rep = containment_suite(&inst, 1.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.c4.iter().all(|&(_, c4)| c4 > 0.0 && c4 < 1.0));
    assert!(!containment_suite(&inst, 0.05).unwrap().pass);
}

#[test]
fn koebe_quarter_bound_is_honoured() {
    let cfg = common::fixture_config();
    let rep = shoot(&cfg, &cfg.half_parameters(), TOL, 20).unwrap();
    let inst = ToyInstance::build(&cfg, &rep.w_star).unwrap();
    let inc = verify_inclusions(&inst, 200).unwrap();
    for row in &inc.rows {
        assert!(row.image_ok, "{row:?}");
        if let (Some(rho), Some(k)) = (row.inner_radius_next, row.koebe_next) {
            assert!(rho >= k * 0.95, "{row:?}");
        }
    }
}

#[test]
fn degree_one_control_fails_inclusion() {
    let mut cfg = common::fixture_config();
    cfg.toy = ToyParams::new(vec![1, 1, 1]);
    let rep = shoot(&cfg, &cfg.half_parameters(), TOL, 20).unwrap();
    let inst = ToyInstance::build(&cfg, &rep.w_star).unwrap();
    assert!(!verify_inclusions(&inst, 100).unwrap().pass);
}

#[test]
fn high_degree_toy_passes_inclusion() {
    let mut cfg = common::fixture_config();
    cfg.toy = ToyParams::new(vec![5, 6, 7]);
    let rep = shoot(&cfg, &cfg.half_parameters(), TOL, 20).unwrap();
    let inst = ToyInstance::build(&cfg, &rep.w_star).unwrap();
    let inc = verify_inclusions(&inst, 200).unwrap();
    assert!(inc.pass, "{inc:?}");
    assert!(inc.rows.iter().all(|r| r.orbit_hits.map_or(true, |h| h == 200)));
}

#[test]
fn identity_limit_is_linear_in_mu_scale() {
    let base = common::fixture_config();
    let w = base.half_parameters();
    let landing = |s: f64| -> Vec<C64> {
        let mut cfg = base.clone();
        cfg.mu_scale = s;
        let inst = ToyInstance::build(&cfg, &w).unwrap();
        (inst.first_index()..=inst.last_index()).map(|n| center_chain(n, &inst).unwrap().c_n).collect()
    };
    let zero = landing(0.0);
    let scales = [1.0, 0.5, 0.25, 0.125, 0.0625];
    let dev: Vec<Vec<f64>> =
        scales.iter().map(|&s| landing(s).iter().zip(&zero).map(|(a, b)| (a - b).norm()).collect()).collect();
    for k in 0..zero.len() {
        // halving the smallest scales halves the deviation
        let tail = dev[3][k] / dev[4][k];
        assert!((tail - 2.0).abs() < 0.1, "level {k}: ratio {tail}");
        // and the slope stays bounded over the whole range
        let slope = dev[4][k] / scales[4];
        for (s, d) in scales.iter().zip(&dev) {
            assert!(d[k] / s < 3.0 * slope && d[k] > 0.0, "level {k}, s = {s}: {}", d[k]);
        }
    }
}

#[test]
fn orbit_of_the_landing_centre_visits_the_discs() {
    let cfg = common::fixture_config();
    let rep = shoot(&cfg, &cfg.half_parameters(), TOL, 20).unwrap();
    let inst = ToyInstance::build(&cfg, &rep.w_star).unwrap();
    let first = inst.first_index();
    let start = center_chain(first, &inst).unwrap().c_n;
    let orbit = iterate_orbit(|z| inst.f(z), start, 40, 1e4).unwrap();
    for (k, n) in (first..=inst.last_index()).enumerate() {
        let l = inst.level(n).unwrap();
        let u = inst.phi.eval(c(0.0, l.h));
        let step = 3 + 4 * k;
        assert!((orbit.points[step] - u).norm() < inst.rprime(n).unwrap(), "step {step}");
        assert!((orbit.points[step + 1] - inst.w.get(n)).norm() < 0.5f64.powi(2 * l.d as i32));
    }
}

#[test]
fn base_map_orbits_and_fields() {
    let r = iterate_orbit(g_eval, c(3.0, 0.0), 10, 1e3).unwrap();
    assert_eq!(r.classification, OrbitClass::Escaping);
    assert!(r.escape_index.unwrap() <= 3);
    let window = Rectangle { center: c(0.0, 0.0), half_width: 4.0, half_height: 4.0 };
    let a = escape_time_field(g_eval, window, 64, 64, 50, 1e3).unwrap();
    let b = escape_time_field(g_eval, window, 64, 64, 50, 1e3).unwrap();
    assert_eq!(a, b);
    // pixel (56, 32) has centre 3.125 - 0.0625i
    assert!(a.get(56, 32) <= 3);
    let tiny = Rectangle { center: c(0.0, 0.0), half_width: 1e-3, half_height: 1e-3 };
    let f = escape_time_field(|z: C64| Ok(z * 0.5), tiny, 2, 2, 20, 10.0).unwrap();
    assert!(f.counts.iter().all(|&v| v == ESCAPE_INTERIOR));
}

#[test]
fn symmetric_variant_preserves_and_escapes_the_real_line() {
    let mut cfg: InstanceConfig = common::fixture_config();
    cfg.symmetric = true;
    let w = ParameterSequence::new(cfg.toy.first_index, vec![c(0.3, 0.4), c(0.45, -0.2)], c(0.5, 0.0));
    let inst = ToyInstance::build(&cfg, &w).unwrap();
    assert!(real_axis_deviation(&inst, 400) < 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..100 {
        let x = rng.gen_range(-20.0..20.0);
        let fx = inst.f(c(x, 0.0)).unwrap();
        assert!(fx.im.abs() < 1e-6 * fx.norm().max(1.0));
        let r = iterate_orbit(|z| inst.f(z), c(x, 0.0), 50, 1e4).unwrap();
        assert_eq!(r.classification, OrbitClass::Escaping, "x = {x}: {:?}", r.flag);
    }
}
