mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use pellsum::bigreal::{CertifiedReal, Constant, Expr, PrecisionPolicy};
use pellsum::reduction::{dujella_petho, expand_cf, ReductionInstance};

#[test]
fn surd_oracle_sanity() {
    let two = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    assert_eq!(common::surd_cf(0, 2, 1, 6), two(&[1, 2, 2, 2, 2, 2]));
    // golden ratio (1 + sqrt 5) / 2
    assert_eq!(common::surd_cf(1, 5, 2, 5), two(&[1, 1, 1, 1, 1]));
    // sqrt(7) = [2; 1, 1, 1, 4]
    assert_eq!(common::surd_cf(0, 7, 1, 5), two(&[2, 1, 1, 1, 4]));
    // (-3 + sqrt 13) / 2 = 0.302..., then the period of the golden-like tail
    assert_eq!(common::surd_cf(-3, 13, 2, 2)[0], BigInt::from(0));
}

#[test]
fn expansions_recertify() {
    common::cf_recertification(common::CASES).unwrap();
}

#[test]
fn reduction_outcomes_are_sound() {
    common::reduction_soundness(common::CASES).unwrap();
}

/// gamma = sqrt 2, mu = 1/3, A = 1, B = 2, M = 10: no `u <= 10` gets closer
/// than `2^-w` for any `w >= w_bound`.
#[test]
fn toy_bound_survives_exhaustive_search() {
    let gamma = Expr::constant(Constant::Sqrt2);
    let cf = Arc::new(expand_cf(&gamma, 30, &PrecisionPolicy::default()).unwrap());
    let mu = Expr::ratio(1, 3);
    let inst = ReductionInstance::new(cf, mu, Expr::int(1), Expr::int(2), 10.into()).unwrap();
    let out = dujella_petho(&inst, &PrecisionPolicy::default()).unwrap();
    let w0: u32 = out.w_bound.try_into().unwrap();
    let bits = 256;
    let sqrt2 = CertifiedReal::constant(Constant::Sqrt2, bits).unwrap();
    let third = CertifiedReal::from_ratio(1, 3, bits);
    let mut hits = 0;
    for u in 0..=10i64 {
        let x = sqrt2.mul_int(&u.into()).add(&third);
        for v in -2..=20i64 {
            let d = x.sub(&CertifiedReal::from_int(v, bits)).abs();
            assert!(d.is_positive());
            for w in w0..=w0 + 5 {
                let bound = CertifiedReal::from_ratio(1, BigInt::from(1) << w, bits);
                if !bound.certainly_lt(&d) {
                    hits += 1;
                }
            }
        }
    }
    assert_eq!(hits, 0);
}
