//! Independent re-check of a certificate from its recorded numbers.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use super::{
    absolute_bound_record, bound_chain_record, certificate, discrepancy, gamma_expansion,
    round3_pairs, Certificate, ExpectedSet, ReductionRecord, RoundRecord, StageName, StageRecord,
    Verdict, A_ROUND_1, A_ROUND_2, A_ROUND_3, FALLBACK_BITS,
};
use crate::bigreal::decimal;
use crate::bigreal::{CertifiedReal, Constant, Expr, PrecisionPolicy};
use crate::reduction::{
    degenerate_shift, epsilon_at, epsilon_bits, legendre_fallback, shift_log_below_one, shift_mu,
    w_bound_formula, ContinuedFractionExpansion, EpsilonParts, ReductionError,
};
use crate::search;

use super::RealRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("certificate does not parse: {0}")]
    Parse(String),
    #[error("stage {stage}: {reason}")]
    Mismatch { stage: String, reason: String },
    #[error("certificate records a failed run at {stage}: {reason}")]
    RecordedFailure { stage: String, reason: String },
}

fn mismatch<T>(stage: &str, reason: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError::Mismatch {
        stage: stage.to_string(),
        reason: reason.into(),
    })
}

fn int<T: std::str::FromStr>(stage: &str, field: &str, s: &str) -> Result<T, VerifyError> {
    s.parse()
        .or_else(|_| mismatch(stage, format!("{field} = {s:?} is not an integer")))
}

fn ensure(stage: &str, ok: bool, reason: impl Into<String>) -> Result<(), VerifyError> {
    if ok {
        Ok(())
    } else {
        mismatch(stage, reason)
    }
}

struct Ctx {
    cf: Arc<ContinuedFractionExpansion>,
    policy: PrecisionPolicy,
    m_big: BigInt,
}

/// What a Dujella-Pethő record asserts, re-derived at a chosen precision.
struct DpClaim<'a> {
    mu: Expr,
    q: &'a BigInt,
    a: Expr,
    eps_low: &'a BigRational,
    w_bound: &'a BigInt,
}

impl DpClaim<'_> {
    /// `Ok(Err(reason))` when a claim is not certified at `bits`.
    fn check(&self, ctx: &Ctx, bits: u32) -> Result<Result<EpsilonParts, String>, ReductionError> {
        let parts = epsilon_at(&ctx.cf.value, &self.mu, self.q, &ctx.m_big, bits)?;
        // log eta_3 = mu log(alpha)
        let log_eta = parts
            .mu
            .mul(&CertifiedReal::constant(Constant::LogAlpha, bits)?);
        if !log_eta
            .abs()
            .certainly_lt(&CertifiedReal::from_int(1, bits))
        {
            return Ok(Err("|log eta_3| < 1 fails".into()));
        }
        if self.eps_low > &parts.epsilon.lower().to_rational() {
            return Ok(Err(
                "epsilon lower bound exceeds the recomputed interval".into()
            ));
        }
        let alpha = Expr::constant(Constant::Alpha);
        let w = w_bound_formula(&self.a, &alpha, self.q, self.eps_low, bits)?;
        if &w != self.w_bound {
            return Ok(Err(format!("w_bound is {w}, recorded {}", self.w_bound)));
        }
        Ok(Ok(parts))
    }
}

/// The recorded ball `midpoint ± radius` meets the recomputed one.
fn record_overlaps(rec: &RealRecord, x: &CertifiedReal) -> bool {
    let (Some((mid, km)), Some((rad, kr))) = (
        decimal::parse_scaled(&rec.midpoint),
        decimal::parse_scaled(&rec.radius),
    ) else {
        return false;
    };
    if rad.is_negative() {
        return false;
    }
    // mid ± rad over the common power of ten
    let k = km.min(kr);
    let ten = |d: i64| num_traits::pow(BigInt::from(10), d as usize);
    let (mid, rad) = (mid * ten(km - k), rad * ten(kr - k));
    let (lo, hi) = (&mid - &rad, &mid + &rad);
    let (xl, xu) = (x.lower(), x.upper());
    decimal::cmp_scaled_dyadic(&lo, k, xu.mantissa(), xu.exponent()).is_le()
        && decimal::cmp_scaled_dyadic(&hi, k, xl.mantissa(), xl.exponent()).is_ge()
}

fn check_round(
    ctx: &Ctx,
    stage: &str,
    r: &RoundRecord,
    shifts: &[u64],
    a_const: i64,
) -> Result<BigInt, VerifyError> {
    let shown: Vec<String> = shifts.iter().map(|x| x.to_string()).collect();
    ensure(
        stage,
        r.shifts == shown,
        format!("expected shifts {shown:?}, found {:?}", r.shifts),
    )?;
    ensure(
        stage,
        r.log_eta3_below_one,
        format!("|log eta_3| < 1 not recorded for {shifts:?}"),
    )?;
    let alpha = Expr::constant(Constant::Alpha);
    let a = Expr::int(a_const);
    match (&r.reduction, degenerate_shift(shifts)) {
        (
            ReductionRecord::LegendreFallback {
                gamma_coeff,
                integer_offset,
                m_coeff,
                bracket,
                tie,
                max_partial_quotient,
                w_bound,
            },
            Some(d),
        ) => {
            ensure(
                stage,
                gamma_coeff == &d.gamma_coeff.to_string()
                    && integer_offset == &d.integer_offset.to_string(),
                format!("degenerate structure of {shifts:?} differs"),
            )?;
            let below = shift_log_below_one(shifts, FALLBACK_BITS)
                .or_else(|e| mismatch(stage, e.to_string()))?;
            ensure(
                stage,
                below,
                format!("|log eta_3| < 1 fails for {shifts:?}"),
            )?;
            let mc = &ctx.m_big + BigInt::from(d.gamma_coeff.abs());
            ensure(
                stage,
                m_coeff == &mc.to_string(),
                format!("coefficient bound for {shifts:?} differs"),
            )?;
            let fb = legendre_fallback(&ctx.cf, &mc, &a, &alpha, FALLBACK_BITS)
                .or_else(|e| mismatch(stage, e.to_string()))?;
            ensure(
                stage,
                bracket == &[fb.bracket.lower.to_string(), fb.bracket.upper.to_string()]
                    && *tie == fb.bracket.tie
                    && max_partial_quotient == &fb.max_partial_quotient.to_string()
                    && w_bound == &fb.w_bound.to_string(),
                format!("fallback for {shifts:?} does not reproduce"),
            )?;
            Ok(fb.w_bound)
        }
        (
            ReductionRecord::DujellaPetho {
                convergent_index,
                q_used,
                precision_bits,
                mu,
                epsilon,
                epsilon_lower,
                w_bound,
            },
            None,
        ) => {
            let k: usize = int(stage, "convergent_index", convergent_index)?;
            let q: BigInt = int(stage, "q_used", q_used)?;
            let bits: u32 = int(stage, "precision_bits", precision_bits)?;
            ensure(
                stage,
                ctx.cf.q(k) == Some(&q),
                format!("q_used is not convergent {k}"),
            )?;
            ensure(
                stage,
                q > &ctx.m_big * 6,
                format!("q_{k} does not exceed 6M"),
            )?;
            ensure(
                stage,
                (16..=ctx.policy.max_bits).contains(&bits),
                format!("precision {bits} outside the policy"),
            )?;
            let eps_low: BigRational = decimal::parse_decimal(epsilon_lower)
                .map_or_else(|| mismatch(stage, "epsilon_lower does not parse"), Ok)?;
            ensure(
                stage,
                eps_low.is_positive(),
                format!("epsilon lower bound {epsilon_lower} is not positive"),
            )?;
            let w_rec: BigInt = int(stage, "w_bound", w_bound)?;
            let claim = DpClaim {
                mu: shift_mu(shifts),
                q: &q,
                a: Expr::int(a_const),
                eps_low: &eps_low,
                w_bound: &w_rec,
            };
            // the least precision that can decide eps usually suffices;
            // the recorded one is the fallback
            let least = epsilon_bits(&q, &ctx.m_big).min(bits);
            let mut outcome = claim.check(ctx, least);
            if least < bits && outcome.as_ref().is_ok_and(|o| o.is_err()) {
                outcome = claim.check(ctx, bits);
            }
            let parts = match outcome {
                Ok(Ok(parts)) => parts,
                Ok(Err(reason)) => return mismatch(stage, format!("{reason} for {shifts:?}")),
                Err(e) => return mismatch(stage, e.to_string()),
            };
            ensure(
                stage,
                record_overlaps(mu, &parts.mu) && record_overlaps(epsilon, &parts.epsilon),
                format!("mu or epsilon for {shifts:?} does not reproduce"),
            )?;
            Ok(w_rec)
        }
        (rec, d) => mismatch(
            stage,
            format!(
                "shifts {shifts:?} recorded with {} but degenerate = {}",
                rec.method(),
                d.is_some()
            ),
        ),
    }
}

fn check_rounds(
    ctx: &Ctx,
    stage: &str,
    records: &[RoundRecord],
    shifts: &[Vec<u64>],
    a_const: i64,
) -> Result<BigInt, VerifyError> {
    ensure(
        stage,
        records.len() == shifts.len(),
        format!("expected {} records, found {}", shifts.len(), records.len()),
    )?;
    let bounds: Vec<BigInt> = records
        .par_iter()
        .zip(shifts.par_iter())
        .map(|(r, s)| check_round(ctx, stage, r, s, a_const))
        .collect::<Result<_, _>>()?;
    Ok(bounds.into_iter().max().unwrap_or_default())
}

/// Re-derives every recorded claim. `Ok` means the certificate reproduces
/// and its verdict is `verified`.
pub fn verify_certificate(bytes: &[u8]) -> Result<(), VerifyError> {
    let cert: Certificate =
        serde_json::from_slice(bytes).map_err(|e| VerifyError::Parse(e.to_string()))?;
    let cfgs = "config";
    let policy = PrecisionPolicy::new(
        int(cfgs, "initial_bits", &cert.precision_policy.initial_bits)?,
        int(cfgs, "max_bits", &cert.precision_policy.max_bits)?,
        int(cfgs, "growth_factor", &cert.precision_policy.growth_factor)?,
    )
    .or_else(|e| mismatch(cfgs, e.to_string()))?;
    let m_big: BigInt = int(cfgs, "m_big", &cert.config.m_big)?;
    let n_threshold: u64 = int(cfgs, "n_threshold", &cert.config.n_threshold)?;
    let shift_cap: u64 = int(cfgs, "shift_cap_nm", &cert.config.shift_cap_nm)?;
    let expected: ExpectedSet = cert
        .config
        .expected
        .parse()
        .or_else(|e: String| mismatch(cfgs, e))?;

    let names: Vec<&str> = cert.stages.iter().map(|s| s.name()).collect();
    let order: Vec<&str> = StageName::ALL
        .iter()
        .map(|s| s.name())
        .take(names.len())
        .collect();
    ensure(
        "stages",
        names == order,
        format!("stages out of order: {names:?}"),
    )?;

    let mut chain = None;
    let mut cf = None;
    let (mut s1, mut s2, mut s3) = (0u64, 0u64, 0u64);
    let mut found = Vec::new();
    let mut complete = false;
    let mut all_claims_hold = true;

    for stage in &cert.stages {
        let name = stage.name();
        match stage {
            StageRecord::EllZero { solutions, .. } => {
                let case = search::case_ell_zero().or_else(|e| mismatch(name, e.to_string()))?;
                ensure(
                    name,
                    solutions == &certificate::tuple_records(&case.solutions),
                    "l = 0 solutions do not reproduce",
                )?;
            }
            StageRecord::BoundChain { .. } => {
                let (rec, c) = bound_chain_record().or_else(|e| mismatch(name, e))?;
                ensure(name, &rec == stage, "bound-chain values do not reproduce")?;
                all_claims_hold &= c.all_hold();
                if let StageRecord::BoundChain { nonvanishing, .. } = &rec {
                    all_claims_hold &= nonvanishing.iter().all(|n| n.holds);
                }
                chain = Some(c);
            }
            StageRecord::AbsoluteBound { holds, .. } => {
                let c = chain.as_ref().expect("stage order checked");
                let (rec, _, ok) =
                    absolute_bound_record(c, &m_big).or_else(|e| mismatch(name, e))?;
                ensure(name, &rec == stage, "absolute bound does not reproduce")?;
                all_claims_hold &= ok && *holds;
            }
            StageRecord::ReduceNMinusM {
                a_constant,
                m_big: m_rec,
                record,
                bound,
            } => {
                ensure(
                    name,
                    a_constant == &A_ROUND_1.to_string() && m_rec == &m_big.to_string(),
                    "round parameters differ",
                )?;
                let exp = gamma_expansion(&policy).or_else(|e| mismatch(name, e))?;
                let ctx = Ctx {
                    cf: Arc::new(exp),
                    policy,
                    m_big: m_big.clone(),
                };
                let w = check_round(&ctx, name, record, &[], A_ROUND_1)?;
                ensure(
                    name,
                    bound == &w.to_string(),
                    "round bound differs from its record",
                )?;
                s1 = u64::try_from(&w).or_else(|_| mismatch(name, "bound too large"))?;
                all_claims_hold &= s1 <= shift_cap;
                cf = Some(ctx);
            }
            StageRecord::ReduceNMinusEll {
                a_constant,
                shift_range,
                records,
                bound,
            } => {
                let ctx = cf.as_ref().expect("stage order checked");
                ensure(
                    name,
                    a_constant == &A_ROUND_2.to_string() && shift_range == &s1.to_string(),
                    "round parameters differ",
                )?;
                let shifts: Vec<Vec<u64>> = (0..=s1).map(|x| vec![x]).collect();
                let w = check_rounds(ctx, name, records, &shifts, A_ROUND_2)?;
                ensure(
                    name,
                    bound == &w.to_string(),
                    "round bound is not the maximum",
                )?;
                s2 = u64::try_from(&w).or_else(|_| mismatch(name, "bound too large"))?;
            }
            StageRecord::ReduceN {
                a_constant,
                records,
                bound,
                below_threshold,
            } => {
                let ctx = cf.as_ref().expect("stage order checked");
                ensure(
                    name,
                    a_constant == &A_ROUND_3.to_string(),
                    "round parameters differ",
                )?;
                let pairs: Vec<Vec<u64>> = round3_pairs(s1, s2)
                    .into_iter()
                    .map(|p| p.to_vec())
                    .collect();
                let w = check_rounds(ctx, name, records, &pairs, A_ROUND_3)?;
                ensure(
                    name,
                    bound == &w.to_string(),
                    "round bound is not the maximum",
                )?;
                s3 = u64::try_from(&w).or_else(|_| mismatch(name, "bound too large"))?;
                ensure(
                    name,
                    *below_threshold == (s3 <= n_threshold + 1),
                    "threshold flag differs",
                )?;
            }
            StageRecord::BruteForce {
                threshold,
                solutions,
            } => {
                let t = s3.max(n_threshold);
                ensure(
                    name,
                    threshold == &t.to_string(),
                    format!("threshold should be {t}"),
                )?;
                found = search::brute_force(t);
                let rec = certificate::tuple_records(&found);
                ensure(name, solutions == &rec, "search result does not reproduce")?;
                ensure(
                    name,
                    cert.final_solution_set == rec,
                    "final solution set differs from the search",
                )?;
                complete = true;
            }
        }
    }
    if !complete {
        ensure(
            "final",
            cert.final_solution_set.is_empty(),
            "solution set recorded without a search",
        )?;
    }
    ensure(
        "final",
        cert.listed_discrepancy == discrepancy(&found),
        "discrepancy record differs",
    )?;

    match &cert.verdict {
        Verdict::Verified => {
            ensure("verdict", complete, "verified without the final search")?;
            ensure(
                "verdict",
                all_claims_hold,
                "a certified inequality does not hold",
            )?;
            ensure(
                "verdict",
                found == expected.solutions(),
                format!("search differs from the {} set", expected.name()),
            )?;
            Ok(())
        }
        Verdict::Failed { stage, reason } => Err(VerifyError::RecordedFailure {
            stage: stage.clone(),
            reason: reason.clone(),
        }),
    }
}

pub fn certificate_is_valid(bytes: &[u8]) -> bool {
    verify_certificate(bytes).is_ok()
}
