//! Reduction of `0 < |u gamma - v + mu| < A B^-w` to a small bound on `w`.
//!
//! [`dujella_petho`] handles the generic case with a convergent `q > 6M` and
//! `eps = ||mu q|| - M ||gamma q|| > 0`. When `mu` is an integer combination of
//! `1` and `gamma` that test can never succeed, and [`legendre_fallback`]
//! bounds `w` from the best-approximation property of convergents instead.

mod cf;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::bigreal::decimal::{self, Rounding};
use crate::bigreal::{CertifiedReal, Constant, Expr, PrecisionPolicy, RealError};
use crate::pell::ZSqrt2;

pub use cf::{
    convergent_bracketing, expand_cf, legendre_quality, max_partial_quotient, rational_cf, Bracket,
    ContinuedFractionExpansion,
};

/// Convergents tried after the first `q > 6M` before giving up.
pub const CONVERGENT_CAP: usize = 25;
/// Significant digits kept when `eps` is rounded down for the bound formula.
pub const EPSILON_DIGITS: usize = 24;
/// Extra bits on top of `bits(q) + bits(M)` when evaluating `eps`.
const EPSILON_GUARD_BITS: u32 = 96;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegenerateReason {
    /// `||mu q||` shrinks along with `||gamma q||`.
    IntegerCombination,
    /// No certified positive `eps` within the convergent cap.
    ConvergentCap,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("degenerate reduction ({reason:?}) over convergents {first_index}..={last_index}")]
pub struct DegenerateFailure {
    pub reason: DegenerateReason,
    pub first_index: usize,
    pub last_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("value is rational with expansion {quotients:?}")]
    Rational { quotients: Vec<BigInt> },
    #[error("need {needed} certified partial quotients, have {certified}")]
    NotEnoughTerms { needed: usize, certified: usize },
    #[error("Legendre quality check failed at convergent {index}")]
    LegendreCheck { index: usize },
    #[error("invalid reduction instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Degenerate(#[from] DegenerateFailure),
    #[error(transparent)]
    Real(#[from] RealError),
}

/// One inequality `0 < |u gamma - v + mu| < A B^-w` with `u <= M`.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub gamma: Arc<ContinuedFractionExpansion>,
    pub mu: Expr,
    pub a: Expr,
    pub b: Expr,
    pub m_big: BigInt,
}

impl ReductionInstance {
    pub fn new(
        gamma: Arc<ContinuedFractionExpansion>,
        mu: Expr,
        a: Expr,
        b: Expr,
        m_big: BigInt,
    ) -> Result<Self, ReductionError> {
        if m_big < BigInt::one() {
            return Err(ReductionError::InvalidInstance(
                "M must be at least 1".into(),
            ));
        }
        let one = CertifiedReal::from_int(1, 64);
        if !a.eval(64)?.is_positive() {
            return Err(ReductionError::InvalidInstance(format!(
                "A = {a} is not positive"
            )));
        }
        if !one.certainly_lt(&b.eval(64)?) {
            return Err(ReductionError::InvalidInstance(format!(
                "B = {b} is not above 1"
            )));
        }
        Ok(ReductionInstance {
            gamma,
            mu,
            a,
            b,
            m_big,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub convergent_index: usize,
    pub q_used: BigInt,
    pub precision_bits: u32,
    pub mu: CertifiedReal,
    pub epsilon: CertifiedReal,
    /// Lower endpoint of `eps` rounded down to [`EPSILON_DIGITS`] digits.
    pub epsilon_lower: String,
    /// Every solution has `w < w_bound`.
    pub w_bound: BigInt,
}

/// `||mu q||`, `||gamma q||` and `eps = ||mu q|| - M ||gamma q||` at `bits`.
pub struct EpsilonParts {
    pub mu: CertifiedReal,
    pub mu_q: CertifiedReal,
    pub gamma_q: CertifiedReal,
    pub epsilon: CertifiedReal,
}

pub fn epsilon_at(
    gamma: &Expr,
    mu: &Expr,
    q: &BigInt,
    m_big: &BigInt,
    bits: u32,
) -> Result<EpsilonParts, ReductionError> {
    let mu_v = mu.eval(bits)?;
    let qr = CertifiedReal::from_int(q.clone(), bits);
    let mu_q = mu_v.mul(&qr).nearest_int_distance()?;
    let gamma_q = gamma.eval(bits)?.mul(&qr).nearest_int_distance()?;
    let epsilon = mu_q.sub(&gamma_q.mul_int(m_big));
    Ok(EpsilonParts {
        mu: mu_v,
        mu_q,
        gamma_q,
        epsilon,
    })
}

/// Least precision level for `eps` at convergent `q`.
pub fn epsilon_bits(q: &BigInt, m_big: &BigInt) -> u32 {
    (q.bits() + m_big.bits()) as u32 + EPSILON_GUARD_BITS
}

/// Canonical decimal lower bound for `eps`, or `None` if it is not positive.
pub fn epsilon_lower_decimal(eps: &CertifiedReal) -> Option<String> {
    if !eps.is_positive() {
        return None;
    }
    Some(decimal::format_sci(
        &eps.lower().to_rational(),
        EPSILON_DIGITS,
        Rounding::Floor,
    ))
}

/// `ceil(log(A q / eps_lower) / log B)`, taking the upper endpoint.
pub fn w_bound_formula(
    a: &Expr,
    b: &Expr,
    q: &BigInt,
    eps_lower: &BigRational,
    bits: u32,
) -> Result<BigInt, ReductionError> {
    if !eps_lower.is_positive() {
        return Err(ReductionError::InvalidInstance(
            "epsilon lower bound must be positive".into(),
        ));
    }
    let aq = a.eval(bits)?.mul(&CertifiedReal::from_int(q.clone(), bits));
    let ratio = aq.div(&CertifiedReal::from_rational(eps_lower, bits))?;
    let w = ratio.ln()?.div(&b.eval(bits)?.ln()?)?;
    Ok(w.ceil_upper())
}

/// Scans convergents of `gamma` from the first `q > 6M` for a certified
/// `eps > 0` and turns it into a bound on `w`.
pub fn dujella_petho(
    inst: &ReductionInstance,
    policy: &PrecisionPolicy,
) -> Result<ReductionOutcome, ReductionError> {
    policy.validate()?;
    let cf = &inst.gamma;
    let six_m = &inst.m_big * 6;
    let start = cf.convergents.iter().position(|(_, q)| q > &six_m).ok_or(
        ReductionError::NotEnoughTerms {
            needed: cf.certified_terms() + 1,
            certified: cf.certified_terms(),
        },
    )?;
    let tiny = CertifiedReal::from_ratio(1, num_traits::pow(BigInt::from(10), 12), 64);
    let million = BigInt::from(1_000_000);
    let mut collapsed_run = 0;
    for k in start..start + CONVERGENT_CAP {
        let Some(q) = cf.q(k) else {
            return Err(ReductionError::NotEnoughTerms {
                needed: k + 1,
                certified: cf.certified_terms(),
            });
        };
        let levels = policy.levels_from(epsilon_bits(q, &inst.m_big));
        if levels.is_empty() {
            return Err(RealError::PrecisionExhausted {
                bits: policy.max_bits,
                radius: "n/a".into(),
                target: format!("{} bits for eps", epsilon_bits(q, &inst.m_big)),
            }
            .into());
        }
        let mut decided = false;
        for &bits in &levels {
            let parts = epsilon_at(&cf.value, &inst.mu, q, &inst.m_big, bits)?;
            if parts.epsilon.is_positive() {
                let epsilon_lower = epsilon_lower_decimal(&parts.epsilon).expect("positive");
                let eps_low = decimal::parse_decimal(&epsilon_lower).expect("own output parses");
                let w_bound = w_bound_formula(&inst.a, &inst.b, q, &eps_low, bits)?;
                return Ok(ReductionOutcome {
                    convergent_index: k,
                    q_used: q.clone(),
                    precision_bits: bits,
                    mu: parts.mu,
                    epsilon: parts.epsilon,
                    epsilon_lower,
                    w_bound,
                });
            }
            if !parts.epsilon.is_negative() && !parts.epsilon.upper().is_zero() {
                // sign undecided: retry higher
                continue;
            }
            let collapsing = parts.gamma_q.certainly_lt(&tiny)
                && parts
                    .mu_q
                    .certainly_lt(&parts.gamma_q.mul_int(&million).with_bits(bits))
                || parts.mu_q.upper().is_zero();
            collapsed_run = if collapsing { collapsed_run + 1 } else { 0 };
            if collapsed_run >= 2 {
                return Err(DegenerateFailure {
                    reason: DegenerateReason::IntegerCombination,
                    first_index: start,
                    last_index: k,
                }
                .into());
            }
            decided = true;
            break;
        }
        if !decided {
            return Err(RealError::PrecisionExhausted {
                bits: *levels.last().expect("nonempty"),
                radius: "n/a".into(),
                target: format!("sign of eps at convergent {k}"),
            }
            .into());
        }
    }
    Err(DegenerateFailure {
        reason: DegenerateReason::ConvergentCap,
        first_index: start,
        last_index: start + CONVERGENT_CAP - 1,
    }
    .into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FallbackOutcome {
    pub bracket: Bracket,
    pub max_partial_quotient: BigInt,
    pub w_bound: BigInt,
}

/// Bound for `0 < |x gamma - y| < A B^-w` with `0 < x <= m_coeff`.
///
/// With `q_k <= m_coeff < q_(k+1)`, every such `x` satisfies
/// `|x gamma - y| >= |q_k gamma - p_k| > 1 / ((a_M + 2) q_k)`, so
/// `B^w < A (a_M + 2) m_coeff`.
pub fn legendre_fallback(
    cf: &ContinuedFractionExpansion,
    m_coeff: &BigInt,
    a: &Expr,
    b: &Expr,
    bits: u32,
) -> Result<FallbackOutcome, ReductionError> {
    let bracket = convergent_bracketing(cf, m_coeff)?;
    if bracket.upper < 1 {
        return Err(ReductionError::InvalidInstance(format!(
            "coefficient bound {m_coeff} below the first convergent"
        )));
    }
    let a_m = max_partial_quotient(cf, bracket.upper as usize)?;
    let rhs = a.eval(bits)?.mul_int(&(&a_m + 2)).mul_int(m_coeff);
    let w = rhs.ln()?.div(&b.eval(bits)?.ln()?)?;
    Ok(FallbackOutcome {
        bracket,
        max_partial_quotient: a_m,
        w_bound: w.ceil_upper(),
    })
}

/// `mu = log(sqrt2 / c) / log(alpha)` written as `gamma_coeff * gamma + integer_offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateShift {
    pub gamma_coeff: i64,
    pub integer_offset: i64,
}

/// `c = 1 + alpha^-x_1 + ...` exactly in `Z[sqrt 2]`.
pub fn shift_denominator(shifts: &[u64]) -> ZSqrt2 {
    shifts.iter().fold(ZSqrt2::one(), |acc, &x| {
        acc.add(&ZSqrt2::alpha_pow(-(x as i64)))
    })
}

/// Detects `c = sqrt2^e alpha^j` with `e` odd, in which case
/// `mu = ((1 - e)/2) gamma - j` exactly.
pub fn degenerate_shift(shifts: &[u64]) -> Option<DegenerateShift> {
    let (e, j) = shift_denominator(shifts).sqrt2_alpha_decomposition()?;
    (e % 2 == 1).then(|| DegenerateShift {
        gamma_coeff: (1 - e as i64) / 2,
        integer_offset: -j,
    })
}

/// `log(sqrt2 / (1 + sum alpha^-x_i)) / log(alpha)`.
pub fn shift_mu(shifts: &[u64]) -> Expr {
    let denom = shifts.iter().fold(Expr::int(1), |acc, &x| {
        acc.add(Expr::constant(Constant::Alpha).pow_int(-(x as i64)))
    });
    Expr::constant(Constant::Sqrt2)
        .div(denom)
        .ln()
        .div(Expr::constant(Constant::LogAlpha))
}

/// `|log(sqrt2 / c)| < 1`, i.e. the bound on `|log eta_3|` used for `A_3`.
pub fn shift_log_below_one(shifts: &[u64], bits: u32) -> Result<bool, RealError> {
    let l = shift_mu(shifts)
        .mul(Expr::constant(Constant::LogAlpha))
        .eval(bits)?;
    Ok(l.abs().certainly_lt(&CertifiedReal::from_int(1, bits)))
}
