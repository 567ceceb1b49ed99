//! Checks shared by the property tests and the acceptance target. Each
//! returns `Err` with a description of the first counterexample.
#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use pellsum::bigreal::decimal::parse_decimal;
use pellsum::bigreal::{CertifiedReal, Constant, Dyadic, Expr, PrecisionPolicy};
use pellsum::pell;
use pellsum::reduction::expand_cf;
use pellsum::reduction::{dujella_petho, epsilon_at, w_bound_formula, ReductionInstance};

pub const CASES: u32 = 1000;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, check)
        .map_err(|e| e.to_string())
}

// ---- exact oracles -------------------------------------------------------

fn rat(d: &Dyadic) -> BigRational {
    d.to_rational()
}

/// `floor(exp(t) 2^p)` and `ceil(exp(t) 2^p)` bounds, computed in fixed point
/// from the Taylor series with argument halving.
pub fn exp_fixed(t: &BigRational, p: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << p;
    if t.is_negative() {
        let (lo, hi) = exp_fixed(&-t, p);
        let two_p = BigInt::one() << (2 * p);
        let new_lo = &two_p / &hi;
        let new_hi = (&two_p + &lo - 1u32) / &lo;
        return (new_lo, new_hi);
    }
    let mut k = 0u32;
    let half = BigRational::new(1.into(), 2.into());
    let mut s = t.clone();
    while s > half {
        s /= BigInt::from(2);
        k += 1;
    }
    let scaled = &s * BigRational::from_integer(one.clone());
    let (s_lo, s_hi) = (scaled.floor().to_integer(), scaled.ceil().to_integer());
    let (mut sum_lo, mut sum_hi) = (one.clone(), one.clone());
    let (mut term_lo, mut term_hi) = (one.clone(), one.clone());
    let mut j = 1u32;
    while !(term_lo.is_zero() && term_hi <= BigInt::one()) {
        let den = BigInt::from(j) << p;
        term_lo = &term_lo * &s_lo / &den;
        term_hi = (&term_hi * &s_hi + &den - 1u32) / &den;
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        j += 1;
    }
    // remaining terms shrink by at least 1/4 each
    sum_hi += 2u32;
    for _ in 0..k {
        sum_lo = (&sum_lo * &sum_lo) >> p;
        sum_hi = ((&sum_hi * &sum_hi) >> p) + 1u32;
    }
    (sum_lo, sum_hi)
}

/// Certifies `lo <= ln(x) <= hi` through the exp oracle.
pub fn log_contains(x: &BigRational, lo: &BigRational, hi: &BigRational, p: u32) -> bool {
    let scale = BigRational::from_integer(BigInt::one() << p);
    let target = x * &scale;
    let (_, exp_lo_hi) = exp_fixed(lo, p);
    let (exp_hi_lo, _) = exp_fixed(hi, p);
    BigRational::from_integer(exp_lo_hi) <= target && BigRational::from_integer(exp_hi_lo) >= target
}

/// Partial quotients of `(p + sqrt d) / q` by the exact quadratic-surd
/// recurrence. Requires `q | d - p^2`, `q != 0` and `d` not a square.
pub fn surd_cf(p: i64, d: i64, q: i64, terms: usize) -> Vec<BigInt> {
    let (mut p, d, mut q) = (BigInt::from(p), BigInt::from(d), BigInt::from(q));
    let f = d.sqrt();
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let a = if q.is_positive() {
            (&p + &f).div_floor(&q)
        } else {
            (&p + &f + 1u32).div_floor(&q)
        };
        let p_next = &a * &q - &p;
        let q_next = (&d - &p_next * &p_next) / &q;
        out.push(a);
        p = p_next;
        q = q_next;
    }
    out
}

pub fn surd_expr(p: i64, d: i64, q: i64) -> Expr {
    Expr::int(p).add(Expr::int(d).sqrt()).div(Expr::int(q))
}

// ---- strategies ----------------------------------------------------------

fn rational() -> impl Strategy<Value = BigRational> {
    (
        -1_000_000_000_000i64..=1_000_000_000_000,
        1i64..=1_000_000_000,
    )
        .prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn positive_rational() -> impl Strategy<Value = BigRational> {
    (1i64..=1_000_000, 1i64..=1_000_000).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

/// `(p, d, q)` with `q > 0`, `q | d - p^2` and `d > 0` not a square.
fn surd() -> impl Strategy<Value = (i64, i64, i64)> {
    (-40i64..=40, 1i64..=40, 1i64..=300)
        .prop_map(|(p, q, k)| (p, p * p + q * k, q))
        .prop_filter("square discriminant", |&(_, d, _)| {
            let r = (d as f64).sqrt() as i64;
            (r - 1..=r + 1).all(|s| s * s != d)
        })
}

pub fn nested_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-9i64..=9).prop_map(Expr::int),
        (-50i64..=50, 1i64..=50).prop_map(|(n, d)| Expr::ratio(n, d)),
        proptest::sample::select(Constant::ALL.to_vec()).prop_map(Expr::constant),
    ];
    leaf.prop_recursive(10, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), -2i64..=2).prop_map(|(a, n)| a.pow_int(n)),
            inner.clone().prop_map(Expr::ln),
            inner.prop_map(Expr::sqrt),
        ]
    })
}

// ---- bigreal -------------------------------------------------------------

/// Ball arithmetic on random rationals contains the exact result; `ln` and
/// `sqrt` are checked through exact inverse oracles.
pub fn bigreal_containment(cases: u32) -> Result<(), String> {
    let strat = (rational(), rational(), positive_rational(), 24u32..=320);
    run(cases, strat, |(a, b, x, bits)| {
        let ca = CertifiedReal::from_rational(&a, bits);
        let cb = CertifiedReal::from_rational(&b, bits);
        prop_assert!(ca.contains_rational(&a));
        prop_assert!(ca.add(&cb).contains_rational(&(&a + &b)), "add");
        prop_assert!(ca.sub(&cb).contains_rational(&(&a - &b)), "sub");
        prop_assert!(ca.mul(&cb).contains_rational(&(&a * &b)), "mul");
        if !cb.contains_zero() {
            let q = ca
                .div(&cb)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(q.contains_rational(&(&a / &b)), "div");
        }

        let cx = CertifiedReal::from_rational(&x, bits);
        let l = cx.ln().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(
            log_contains(&x, &rat(&l.lower()), &rat(&l.upper()), 4 * bits + 64),
            "ln({x}) at {bits} bits"
        );
        let r = cx.sqrt().map_err(|e| TestCaseError::fail(e.to_string()))?;
        let (lo, hi) = (rat(&r.lower()), rat(&r.upper()));
        prop_assert!(!lo.is_positive() || &lo * &lo <= x, "sqrt lower");
        prop_assert!(&hi * &hi >= x, "sqrt upper");
        Ok(())
    })
}

/// Randomly nested expressions evaluated at `bits` contain the midpoint of
/// the same expression at `4 bits`.
pub fn nested_soundness(cases: u32) -> Result<(), String> {
    run(cases, (nested_expr(), 32u32..=256), |(e, bits)| {
        let Ok(low) = e.eval(bits) else {
            return Ok(());
        };
        let high = e
            .eval(4 * bits)
            .map_err(|err| TestCaseError::fail(format!("{e}: {err} only at 4x")))?;
        prop_assert!(low.contains_dyadic(high.midpoint()), "{e} at {bits}");
        prop_assert!(low.overlaps(&high));
        Ok(())
    })
}

/// Radii never grow along the default precision levels.
pub fn monotone_refinement() -> Result<(), String> {
    let mut exprs: Vec<Expr> = Constant::ALL.iter().copied().map(Expr::constant).collect();
    exprs.push(Expr::gamma());
    exprs.push(Expr::constant(Constant::LogSqrt2).div(Expr::constant(Constant::LogAlpha)));
    exprs.push(Expr::constant(Constant::Alpha).pow_int(40).ln().sqrt());
    exprs.push(Expr::ratio(1, 3).sub(Expr::constant(Constant::Beta).pow_int(-7)));
    for e in &exprs {
        let mut prev: Option<Dyadic> = None;
        for bits in PrecisionPolicy::default().levels() {
            let r = e
                .eval(bits)
                .map_err(|err| format!("{e}: {err}"))?
                .radius()
                .clone();
            if let Some(p) = &prev {
                if &r > p {
                    return Err(format!("{e}: radius grew at {bits} bits"));
                }
            }
            prev = Some(r);
        }
    }
    Ok(())
}

// ---- continued fractions -------------------------------------------------

/// Expansions of random quadratic surds match the exact recurrence, satisfy
/// the convergent identities and are reproduced at double precision.
pub fn cf_recertification(cases: u32) -> Result<(), String> {
    run(cases, (surd(), 20usize..=45), |((p, d, q), terms)| {
        let x = surd_expr(p, d, q);
        let policy = PrecisionPolicy::default();
        let cf = expand_cf(&x, terms, &policy).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&cf.partial_quotients, &surd_cf(p, d, q, terms));
        prop_assert!(cf.check_recurrences());
        for (pk, qk) in &cf.convergents {
            prop_assert!(pk.gcd(qk).is_one());
        }
        cf.check_legendre()
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let bits = 2 * cf.precision_bits;
        let doubled = PrecisionPolicy::new(bits, bits.max(policy.max_bits), 2)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let again =
            expand_cf(&x, terms, &doubled).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&again.partial_quotients, &cf.partial_quotients);
        Ok(())
    })
}

/// Every reduction outcome on a random toy instance survives recomputation
/// at twice its precision.
pub fn reduction_soundness(cases: u32) -> Result<(), String> {
    let strat = (
        surd(),
        1i64..=12,
        2i64..=13,
        2i64..=1_000_000,
        1i64..=10,
        2i64..=3,
    );
    run(cases, strat, |((p, d, q), num, den, m, a, b)| {
        let gamma = surd_expr(p, d, q);
        let cf = expand_cf(&gamma, 80, &PrecisionPolicy::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mu = Expr::ratio(num, den);
        let inst = ReductionInstance::new(
            Arc::new(cf),
            mu.clone(),
            Expr::int(a),
            Expr::int(b),
            m.into(),
        )
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        // failures are allowed; only returned outcomes are claims
        let Ok(out) = dujella_petho(&inst, &PrecisionPolicy::default()) else {
            return Ok(());
        };
        prop_assert!(out.q_used > BigInt::from(6 * m));
        let bits = 2 * out.precision_bits;
        let parts = epsilon_at(&gamma, &mu, &out.q_used, &m.into(), bits)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(parts.epsilon.is_positive());
        let eps_lower = parse_decimal(&out.epsilon_lower).expect("decimal");
        prop_assert!(eps_lower.is_positive());
        prop_assert!(eps_lower <= rat(&parts.epsilon.lower()));
        let w = w_bound_formula(&Expr::int(a), &Expr::int(b), &out.q_used, &eps_lower, bits)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(w, out.w_bound);
        Ok(())
    })
}

// ---- pell ----------------------------------------------------------------

fn alpha_pow(n: i64, bits: u32) -> CertifiedReal {
    CertifiedReal::constant(Constant::Alpha, bits)
        .and_then(|a| a.pow_int(n))
        .expect("alpha power")
}

/// Binet formula for `0 <= n <= 500`.
pub fn pell_binet() -> Result<(), String> {
    for n in 0..=500u64 {
        let bits = 2 * n as u32 + 96;
        let e = Expr::constant(Constant::Alpha)
            .pow_int(n as i64)
            .sub(Expr::constant(Constant::Beta).pow_int(n as i64))
            .div(Expr::int(2).mul(Expr::constant(Constant::Sqrt2)));
        let v = e.eval(bits).map_err(|err| err.to_string())?;
        let quarter = Dyadic::pow2(-2);
        if v.radius() >= &quarter || !v.contains_rational(&BigRational::from_integer(pell::pell(n)))
        {
            return Err(format!("Binet fails at n = {n}"));
        }
    }
    Ok(())
}

/// `alpha^(n-2) <= P_n <= alpha^(n-1)` for `1 <= n <= 500`.
pub fn pell_size_bounds() -> Result<(), String> {
    for n in 1..=500i64 {
        let bits = 2 * n as u32 + 96;
        let p = Dyadic::from_int(pell::pell(n as u64));
        if alpha_pow(n - 2, bits).upper() > p || p > alpha_pow(n - 1, bits).lower() {
            return Err(format!("size bound fails at n = {n}"));
        }
    }
    Ok(())
}

/// `nu2(P_n) = nu2(n)` and `nu2(Q_n) = 1` for `1 <= n <= 5000`.
pub fn pell_valuations() -> Result<(), String> {
    let p = pell::pell_prefix(5000);
    for n in 1..=5000u64 {
        let lucas = pell::pell_lucas(n);
        let nu_n = u64::from(n.trailing_zeros());
        if pell::nu2(&p[n as usize]) != Ok(nu_n) || pell::nu2(&lucas) != Ok(1) {
            return Err(format!("valuation fails at n = {n}"));
        }
    }
    Ok(())
}

/// The two-term factorization for all `1 <= m <= n <= 300` of equal parity.
pub fn pell_identity() -> Result<(), String> {
    for n in 1..=300u64 {
        for m in (1..=n).filter(|m| (n - m) % 2 == 0) {
            let f = pell::two_sum_factorization(n, m).map_err(|e| e.to_string())?;
            let expect = if (n - m) % 4 == 0 { 1 } else { -1 };
            let lhs = pell::pell(f.half_sum_index) * pell::pell_lucas(f.half_diff_index);
            if f.delta != expect || lhs != pell::pell(n) + pell::pell(m) {
                return Err(format!("identity fails at ({n}, {m})"));
            }
        }
    }
    Ok(())
}

/// Primitive divisors for `13 <= n <= 80`.
pub fn pell_primitive_divisors() -> Result<(), String> {
    for n in 13..=80 {
        if !pell::has_prime_factor_at_least(n).map_err(|e| e.to_string())? {
            return Err(format!("no prime factor >= {} in P_{n}", n - 1));
        }
    }
    Ok(())
}

pub fn pell_suite() -> Result<(), String> {
    pell_binet()?;
    pell_size_bounds()?;
    pell_valuations()?;
    pell_identity()?;
    pell_primitive_divisors()
}
