//! Reference values with independent oracles: f64 evaluations, hand
//! recurrences and exact integer arithmetic.

use std::sync::Arc;

use num_bigint::BigInt;
use pellsum::bigreal::{CertifiedReal, Constant, Expr, PrecisionPolicy};
use pellsum::matveev::{
    a3_parameter, bound_chain, height_bound_eta3, height_of_named, matveev_exponent,
    nonvanishing_guard, solve_log_bound, LinearForm, MatveevInstance, NamedAlgebraic,
};
use pellsum::pell;
use pellsum::pipeline::gamma_expansion;
use pellsum::reduction::{
    convergent_bracketing, degenerate_shift, expand_cf, legendre_fallback, max_partial_quotient,
};

const BITS: u32 = 256;

fn close(x: &CertifiedReal, expect: f64, rel: f64) -> bool {
    (x.to_f64() - expect).abs() <= rel * expect.abs()
}

fn pow10(mant: u32, exp: usize) -> BigInt {
    BigInt::from(mant) * num_traits::pow(BigInt::from(10), exp)
}

#[test]
fn constants() {
    let sqrt2 = CertifiedReal::constant(Constant::Sqrt2, 64).unwrap();
    assert!(close(&sqrt2, 2f64.sqrt(), 1e-15));
    let la = CertifiedReal::constant(Constant::LogAlpha, 64).unwrap();
    assert!(close(&la, (1.0 + 2f64.sqrt()).ln(), 1e-15));
    let gamma = Expr::gamma().eval(128).unwrap();
    assert!(close(&gamma, 2f64.ln() / (1.0 + 2f64.sqrt()).ln(), 1e-15));
    let dist = gamma.nearest_int_distance().unwrap();
    assert!(close(
        &dist,
        1.0 - 2f64.ln() / (1.0 + 2f64.sqrt()).ln(),
        1e-14
    ));
    let l2 = CertifiedReal::from_int(2, 128).ln().unwrap();
    assert!(close(&l2, 2f64.ln(), 1e-15));
}

#[test]
fn pell_examples() {
    assert_eq!(pell::nu2(&pell::pell(8)), Ok(3));
    assert_eq!(pell::pell(8), BigInt::from(408));
    let f = pell::two_sum_factorization(5, 1).unwrap();
    assert_eq!((f.delta, f.half_sum_index, f.half_diff_index), (1, 3, 2));
    let f = pell::two_sum_factorization(3, 1).unwrap();
    assert_eq!((f.delta, f.half_sum_index, f.half_diff_index), (-1, 1, 2));
    for n in [13, 14, 20] {
        assert!(pell::has_prime_factor_at_least(n).unwrap());
    }
}

#[test]
fn heights_and_a3() {
    let ha = height_of_named(NamedAlgebraic::Alpha, BITS).unwrap();
    assert!(close(&ha, 0.5 * (1.0 + 2f64.sqrt()).ln(), 1e-14));
    assert!(ha.mul(&CertifiedReal::from_int(2, BITS)).upper().to_f64() <= 0.9);

    let h1 = height_bound_eta3(&[1], BITS).unwrap();
    assert!(close(
        &h1,
        1.5 * 2f64.ln() + 0.5 * (1.0 + 2f64.sqrt()).ln(),
        1e-14
    ));
    assert!(close(&h1, 1.48042, 1e-5));
    let h12 = height_bound_eta3(&[1, 2], BITS).unwrap();
    assert!(close(
        &h12,
        2.5 * 2f64.ln() + 1.5 * (1.0 + 2f64.sqrt()).ln(),
        1e-14
    ));
    assert!(close(&h12, 3.05493, 1e-5));

    assert_eq!(a3_parameter(&[0], BITS).unwrap().to_f64(), 3.0);
    assert!(close(
        &a3_parameter(&[5], BITS).unwrap(),
        3.0 + 5.0 * 0.881_373_587,
        1e-8
    ));
}

#[test]
fn matveev_examples() {
    // t = 1, D = 1, A = 1, B just above e: 1.4 * 30^4 * (1 + log 1) * 1 * 2
    let b = CertifiedReal::from_ratio(271_828_183, 100_000_000, BITS);
    let inst = MatveevInstance::new(1, vec![CertifiedReal::from_int(1, BITS)], b).unwrap();
    let ex = matveev_exponent(&inst, BITS).unwrap();
    assert!(close(&ex, 2_268_000.0, 1e-6), "{}", ex.to_f64());

    let oracle =
        1.4 * 30f64.powi(6) * 3f64.powf(4.5) * 4.0 * (1.0 + 2f64.ln()) * 1.4 * 0.9 * 0.7 * 2.0;
    let chain = bound_chain().unwrap();
    assert!(close(&chain.first_form_coefficient, oracle, 1e-12));
    assert!(close(&chain.first_form_coefficient, 1.72e12, 0.01));
    assert!(chain.first_form_coefficient.upper().to_f64() < 1.8e12);
    assert!(chain.all_hold());
}

#[test]
fn log_bound_examples() {
    let c = CertifiedReal::from_int(pow10(17, 36), BITS);
    let n = solve_log_bound(&c, 3).unwrap();
    let ratio = n.to_string().parse::<f64>().unwrap() / 1.7e43;
    assert!((1.0 / 1.05..=1.05).contains(&ratio), "{n}");
}

#[test]
fn nonvanishing_examples() {
    let g = nonvanishing_guard(LinearForm::Third, 151, 151, 151, BITS).unwrap();
    assert!(g.holds);
    assert!(3.0 * (2f64.sqrt() - 1.0).powi(151) < 1.0);
    let g = nonvanishing_guard(LinearForm::Second, 151, 150, 0, BITS).unwrap();
    assert!(g.holds);
    let g = nonvanishing_guard(LinearForm::First, 151, 0, 0, BITS).unwrap();
    assert!(g.holds && g.note.contains("P_302"));
}

#[test]
fn continued_fractions() {
    let sqrt2 = expand_cf(
        &Expr::constant(Constant::Sqrt2),
        6,
        &PrecisionPolicy::default(),
    )
    .unwrap();
    assert_eq!(
        sqrt2.partial_quotients,
        [1, 2, 2, 2, 2, 2].map(BigInt::from)
    );
    let br = convergent_bracketing(&sqrt2, &BigInt::from(5)).unwrap();
    assert_eq!((br.lower, br.upper, br.tie), (2, 3, true));

    let gamma = gamma_expansion(&PrecisionPolicy::default()).unwrap();
    assert_eq!(
        gamma.partial_quotients[..5],
        [0, 1, 3, 1, 2].map(BigInt::from)
    );
    let br = convergent_bracketing(&gamma, &pow10(4, 43)).unwrap();
    assert_eq!((br.lower, br.upper, br.tie), (87, 88, false));
    assert!(gamma.q(87).unwrap() < &pow10(4, 43) && &pow10(4, 43) < gamma.q(88).unwrap());
    assert_eq!(max_partial_quotient(&gamma, 88).unwrap(), BigInt::from(100));
    assert_eq!(max_partial_quotient(&gamma, 4).unwrap(), BigInt::from(3));
}

#[test]
fn fallback_bound_for_both_degenerate_shifts() {
    let gamma = Arc::new(gamma_expansion(&PrecisionPolicy::default()).unwrap());
    let alpha = Expr::constant(Constant::Alpha);
    for (shift, coeff, offset) in [(1u64, 0i64, 0i64), (2, -1, 1)] {
        let d = degenerate_shift(&[shift]).unwrap();
        assert_eq!((d.gamma_coeff, d.integer_offset), (coeff, offset));
        let m = pow10(4, 43) + d.gamma_coeff.abs();
        let fb = legendre_fallback(&gamma, &m, &Expr::int(6), &alpha, BITS).unwrap();
        assert_eq!(fb.w_bound, BigInt::from(122));
        assert_eq!(fb.max_partial_quotient, BigInt::from(100));
    }
    // the same bound by f64: log(6 * 102 * 4e43) / log(alpha)
    let w = (6.0 * 102.0 * 4e43f64).ln() / (1.0 + 2f64.sqrt()).ln();
    assert_eq!(w.ceil(), 122.0);
    assert!(degenerate_shift(&[3]).is_none());
}
