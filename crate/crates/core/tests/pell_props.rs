mod common;

use num_bigint::BigInt;
use pellsum::pell;
use proptest::prelude::*;

#[test]
fn binet() {
    common::pell_binet().unwrap();
}

#[test]
fn size_bounds() {
    common::pell_size_bounds().unwrap();
}

#[test]
fn valuations() {
    common::pell_valuations().unwrap();
}

#[test]
fn two_sum_identity() {
    common::pell_identity().unwrap();
}

#[test]
fn primitive_divisors() {
    common::pell_primitive_divisors().unwrap();
}

#[test]
fn small_values() {
    let p: Vec<_> = (0..=12).map(pell::pell).collect();
    let expect = [0, 1, 2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741, 13860];
    assert_eq!(p, expect.map(BigInt::from));
    let q: Vec<_> = (0..=4).map(pell::pell_lucas).collect();
    assert_eq!(q, [2, 2, 6, 14, 34].map(BigInt::from));
    assert_eq!(pell::pell(14), BigInt::from(2 * 13 * 13 * 239));
    assert_eq!(pell::pell(13), BigInt::from(33461));
}

#[test]
fn parity_mismatch_is_rejected() {
    assert!(pell::two_sum_factorization(4, 1).is_err());
    assert!(pell::two_sum_factorization(1, 3).is_err());
}

proptest! {
    #[test]
    fn recurrence_holds(n in 2u64..2000) {
        prop_assert_eq!(pell::pell(n), 2 * pell::pell(n - 1) + pell::pell(n - 2));
        prop_assert_eq!(pell::pell_lucas(n), 2 * pell::pell_lucas(n - 1) + pell::pell_lucas(n - 2));
    }

    #[test]
    fn lucas_square_identity(n in 0u64..1500) {
        // Q_n^2 - 8 P_n^2 = 4 (-1)^n
        let q = pell::pell_lucas(n);
        let p = pell::pell(n);
        let rhs = if n % 2 == 0 { 4 } else { -4 };
        prop_assert_eq!(&q * &q - 8 * &p * &p, BigInt::from(rhs));
    }
}
