//! LogReal ordering against exact integer arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use qrwd::numerics::LogReal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sign * m * 2^k` as both an exact integer and a LogReal.
fn sample(rng: &mut ChaCha8Rng) -> (BigInt, LogReal, (i8, u64, u32)) {
    let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
    let m: u64 = rng.gen_range(1..(1u64 << 53));
    // 2^144000 is about e^99813
    let k: u32 = rng.gen_range(0..144_000);
    let exact = BigInt::from(sign as i64 * m as i64) << k as usize;
    let log = LogReal::encode(sign as f64 * m as f64).mul(LogReal::new(1, k as f64 * std::f64::consts::LN_2));
    (exact, log, (sign, m, k))
}

/// True when `a` and `b` are within relative `1e-9`, too close for a float log.
fn too_close(a: &BigInt, b: &BigInt) -> bool {
    if a == b {
        return false;
    }
    let diff = (a - b).magnitude().bits();
    let top = a.magnitude().bits().max(b.magnitude().bits());
    diff + 30 < top
}

#[test]
fn comparison_matches_exact_on_ten_thousand_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    let mut near_pairs = 0;
    for i in 0..10_000 {
        let (a, la, pa) = sample(&mut rng);
        let (b, lb) = if i % 10 == 0 {
            (a.clone(), la)
        } else if i % 10 == 1 {
            // same scale, nearby mantissa
            let (s, m, k) = pa;
            let m2 = (m + rng.gen_range(1..1u64 << 40)).min((1u64 << 53) - 1);
            let b = BigInt::from(s as i64 * m2 as i64) << k as usize;
            let lb = LogReal::encode(s as f64 * m2 as f64).mul(LogReal::new(1, k as f64 * std::f64::consts::LN_2));
            (b, lb)
        } else {
            let (b, lb, _) = sample(&mut rng);
            (b, lb)
        };
        if too_close(&a, &b) {
            near_pairs += 1;
            continue;
        }
        assert_eq!(la.total_cmp(&lb), a.cmp(&b), "pair {i}: {la} vs {lb}");
        checked += 1;
    }
    assert!(checked > 9_000, "only {checked} pairs were separable ({near_pairs} too close)");
    assert_eq!(LogReal::ZERO.total_cmp(&LogReal::encode(-1e-300)), Ordering::Greater);
}
