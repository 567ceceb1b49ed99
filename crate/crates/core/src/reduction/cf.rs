//! Continued fractions certified from interval endpoints.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ReductionError;
use crate::bigreal::{CertifiedReal, Expr, PrecisionPolicy, RealError};

/// Partial quotients and convergents of a real, each one certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFractionExpansion {
    pub value: Expr,
    pub partial_quotients: Vec<BigInt>,
    /// `(p_k, q_k)` for every certified `k`.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Precision at which the quotients were certified.
    pub precision_bits: u32,
}

/// Consecutive convergent indices around a bound.
///
/// `lower = -1` is the sentinel for "no convergent below the bound" (the bound
/// is at most `q_0 = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lower: i64,
    pub upper: i64,
    /// `q_lower == bound` exactly.
    pub tie: bool,
}

/// Full expansion of an exact rational, stopping after `limit` quotients.
pub fn rational_cf(r: &BigRational, limit: usize) -> Vec<BigInt> {
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    let mut out = Vec::new();
    while !den.is_zero() && out.len() < limit {
        let (q, rem) = num.div_mod_floor(&den);
        out.push(q);
        num = den;
        den = rem;
    }
    out
}

impl ContinuedFractionExpansion {
    pub fn certified_terms(&self) -> usize {
        self.partial_quotients.len()
    }

    fn from_quotients(value: Expr, quotients: Vec<BigInt>, bits: u32) -> Self {
        let mut convergents = Vec::with_capacity(quotients.len());
        let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
        let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
        for a in &quotients {
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            convergents.push((p, q));
        }
        ContinuedFractionExpansion {
            value,
            partial_quotients: quotients,
            convergents,
            precision_bits: bits,
        }
    }

    pub fn q(&self, k: usize) -> Option<&BigInt> {
        self.convergents.get(k).map(|(_, q)| q)
    }

    /// Checks `|q_k x - p_k| < 1 / q_k` for every certified index.
    pub fn check_legendre(&self) -> Result<(), ReductionError> {
        let bits = self.precision_bits;
        let x = self.value.eval(bits)?;
        for (k, (p, q)) in self.convergents.iter().enumerate() {
            let qr = CertifiedReal::from_int(q.clone(), bits);
            let d = x
                .mul(&qr)
                .sub(&CertifiedReal::from_int(p.clone(), bits))
                .abs();
            if !d.mul(&qr).certainly_lt(&CertifiedReal::from_int(1, bits)) {
                return Err(ReductionError::LegendreCheck { index: k });
            }
        }
        Ok(())
    }

    /// Checks the recurrences and `gcd(p_k, q_k) = 1`.
    pub fn check_recurrences(&self) -> bool {
        let rebuilt = Self::from_quotients(
            self.value.clone(),
            self.partial_quotients.clone(),
            self.precision_bits,
        );
        rebuilt.convergents == self.convergents
            && self.convergents.iter().all(|(p, q)| p.gcd(q).is_one())
            && self.convergents.windows(2).skip(1).all(|w| w[0].1 < w[1].1)
    }
}

/// Certifies the first `terms` partial quotients of `x`.
///
/// At each precision level the continued fractions of both ball endpoints
/// are computed exactly; a quotient counts as certified when both expansions
/// agree on it and continue past it. An exact ball whose expansion ends
/// before `terms` is reported as [`ReductionError::Rational`].
pub fn expand_cf(
    x: &Expr,
    terms: usize,
    policy: &PrecisionPolicy,
) -> Result<ContinuedFractionExpansion, ReductionError> {
    policy.validate()?;
    let mut last_bits = policy.initial_bits;
    for bits in policy.levels() {
        last_bits = bits;
        let v = x.eval(bits)?;
        if v.is_exact() {
            let qs = rational_cf(&v.midpoint().to_rational(), terms + 1);
            if qs.len() <= terms {
                return Err(ReductionError::Rational { quotients: qs });
            }
            let mut qs = qs;
            qs.truncate(terms);
            return Ok(ContinuedFractionExpansion::from_quotients(
                x.clone(),
                qs,
                bits,
            ));
        }
        let lo = rational_cf(&v.lower().to_rational(), terms + 2);
        let hi = rational_cf(&v.upper().to_rational(), terms + 2);
        let usable = lo.len().saturating_sub(1).min(hi.len().saturating_sub(1));
        let agree = lo
            .iter()
            .zip(&hi)
            .take(usable)
            .take_while(|(a, b)| a == b)
            .count();
        if agree >= terms {
            return Ok(ContinuedFractionExpansion::from_quotients(
                x.clone(),
                lo[..terms].to_vec(),
                bits,
            ));
        }
    }
    Err(ReductionError::Real(RealError::PrecisionExhausted {
        bits: last_bits,
        radius: "n/a".into(),
        target: format!("{terms} agreeing partial quotients"),
    }))
}

/// Consecutive indices `(k, k+1)` with `q_k <= bound < q_(k+1)`, or
/// `(-1, 0)` when `bound <= q_0 = 1`.
pub fn convergent_bracketing(
    cf: &ContinuedFractionExpansion,
    bound: &BigInt,
) -> Result<Bracket, ReductionError> {
    if bound <= &BigInt::one() {
        return Ok(Bracket {
            lower: -1,
            upper: 0,
            tie: bound.is_one(),
        });
    }
    let first_above = cf.convergents.iter().position(|(_, q)| q >= bound).ok_or(
        ReductionError::NotEnoughTerms {
            needed: cf.certified_terms() + 1,
            certified: cf.certified_terms(),
        },
    )?;
    let j = first_above as i64;
    if cf.convergents[first_above].1 == *bound {
        if first_above + 1 >= cf.certified_terms() {
            return Err(ReductionError::NotEnoughTerms {
                needed: first_above + 2,
                certified: cf.certified_terms(),
            });
        }
        Ok(Bracket {
            lower: j,
            upper: j + 1,
            tie: true,
        })
    } else {
        Ok(Bracket {
            lower: j - 1,
            upper: j,
            tie: false,
        })
    }
}

/// `max(a_1, ..., a_upto)`.
pub fn max_partial_quotient(
    cf: &ContinuedFractionExpansion,
    upto: usize,
) -> Result<BigInt, ReductionError> {
    if upto >= cf.certified_terms() || upto == 0 {
        return Err(ReductionError::NotEnoughTerms {
            needed: upto + 1,
            certified: cf.certified_terms(),
        });
    }
    Ok(cf.partial_quotients[1..=upto]
        .iter()
        .max()
        .cloned()
        .expect("nonempty range"))
}

/// `true` when `|x - p/q| < 1/q^2` is certified for the ball `x`.
pub fn legendre_quality(x: &CertifiedReal, p: &BigInt, q: &BigInt) -> bool {
    let bits = x.precision_bits();
    let qr = CertifiedReal::from_int(q.clone(), bits);
    let d = x.mul(&qr).sub(&CertifiedReal::from_int(p.clone(), bits));
    d.abs()
        .mul(&qr)
        .certainly_lt(&CertifiedReal::from_int(1, bits))
        && q.is_positive()
}
