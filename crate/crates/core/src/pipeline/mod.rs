//! End-to-end replay: the `l = 0` case, the bound chain, three reduction
//! rounds and the final search, recorded in a [`Certificate`].

mod certificate;
mod verify;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;

use crate::bigreal::decimal;
use crate::bigreal::{Constant, Expr, PrecisionPolicy};
use crate::matveev::{self, LinearForm, CHAIN_BITS, CHAIN_MIN_N};
use crate::reduction::{
    degenerate_shift, dujella_petho, expand_cf, legendre_fallback, shift_log_below_one, shift_mu,
    ContinuedFractionExpansion, ReductionInstance,
};
use crate::search::{self, SolutionTuple, ALL_SOLUTIONS, LISTED_SOLUTIONS};

pub use certificate::{
    emit_report, Certificate, CoefficientRecord, ConfigRecord, Discrepancy, NonvanishingRecord,
    OutputFormat, PolicyRecord, RealRecord, ReductionRecord, RoundRecord, StageRecord, TupleRecord,
    Verdict,
};
pub use verify::{certificate_is_valid, verify_certificate, VerifyError};

/// Partial quotients of `gamma` certified up front; the scans stay well below.
pub const GAMMA_TERMS: usize = 140;
/// Precision for the fallback bound and the `|log eta_3|` checks.
pub const FALLBACK_BITS: u32 = 256;
/// Significant digits printed for reals in the certificate.
pub const REAL_DIGITS: usize = 30;

const A_ROUND_1: i64 = 10;
const A_ROUND_2: i64 = 6;
const A_ROUND_3: i64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StageName {
    EllZero,
    BoundChain,
    AbsoluteBound,
    ReduceNMinusM,
    ReduceNMinusEll,
    ReduceN,
    BruteForce,
}

impl StageName {
    pub const ALL: [StageName; 7] = [
        StageName::EllZero,
        StageName::BoundChain,
        StageName::AbsoluteBound,
        StageName::ReduceNMinusM,
        StageName::ReduceNMinusEll,
        StageName::ReduceN,
        StageName::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StageName::EllZero => "ell_zero",
            StageName::BoundChain => "bound_chain",
            StageName::AbsoluteBound => "absolute_bound",
            StageName::ReduceNMinusM => "reduce_n_minus_m",
            StageName::ReduceNMinusEll => "reduce_n_minus_ell",
            StageName::ReduceN => "reduce_n",
            StageName::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for StageName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StageName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StageName::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// Which solution set the final search must reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExpectedSet {
    /// The complete nine-element set.
    #[default]
    Corrected,
    /// The commonly listed eight solutions.
    Published,
}

impl ExpectedSet {
    pub fn name(self) -> &'static str {
        match self {
            ExpectedSet::Corrected => "corrected",
            ExpectedSet::Published => "published",
        }
    }

    pub fn solutions(self) -> &'static [SolutionTuple] {
        match self {
            ExpectedSet::Corrected => &ALL_SOLUTIONS,
            ExpectedSet::Published => &LISTED_SOLUTIONS,
        }
    }
}

impl FromStr for ExpectedSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corrected" => Ok(ExpectedSet::Corrected),
            "published" => Ok(ExpectedSet::Published),
            other => Err(format!("unknown expected set {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub n_threshold: u64,
    pub m_big: BigInt,
    pub precision: PrecisionPolicy,
    pub shift_cap_nm: u64,
    pub output_format: OutputFormat,
    pub expected: ExpectedSet,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n_threshold: 150,
            m_big: BigInt::from(4) * num_traits::pow(BigInt::from(10), 43),
            precision: PrecisionPolicy::default(),
            shift_cap_nm: 200,
            output_format: OutputFormat::Json,
            expected: ExpectedSet::Corrected,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_threshold < 1 {
            return Err("n_threshold must be at least 1".into());
        }
        if self.m_big < BigInt::from(6) {
            return Err("m_big must be at least 6".into());
        }
        self.precision.validate().map_err(|e| e.to_string())
    }
}

/// A stage that did not certify its claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: StageName,
    pub reason: String,
}

fn fail<T>(stage: StageName, reason: impl fmt::Display) -> Result<T, StageFailure> {
    Err(StageFailure {
        stage,
        reason: reason.to_string(),
    })
}

pub fn gamma_expansion(policy: &PrecisionPolicy) -> Result<ContinuedFractionExpansion, String> {
    expand_cf(&Expr::gamma(), GAMMA_TERMS, policy).map_err(|e| e.to_string())
}

/// Reduces `0 < |u gamma - v + mu(shifts)| < A alpha^-w` with `u <= M`,
/// using the fallback when `mu` is an integer combination of `1` and `gamma`.
pub fn reduce_shift_set(
    cf: &Arc<ContinuedFractionExpansion>,
    shifts: &[u64],
    a_const: i64,
    m_big: &BigInt,
    policy: &PrecisionPolicy,
) -> Result<RoundRecord, String> {
    let below = shift_log_below_one(shifts, FALLBACK_BITS).map_err(|e| e.to_string())?;
    if !below {
        return Err(format!(
            "|log eta_3| < 1 not certified for shifts {shifts:?}"
        ));
    }
    let alpha = Expr::constant(Constant::Alpha);
    let reduction = if let Some(d) = degenerate_shift(shifts) {
        let m_coeff = m_big + BigInt::from(d.gamma_coeff.abs());
        let fb = legendre_fallback(cf, &m_coeff, &Expr::int(a_const), &alpha, FALLBACK_BITS)
            .map_err(|e| format!("fallback for shifts {shifts:?}: {e}"))?;
        ReductionRecord::LegendreFallback {
            gamma_coeff: d.gamma_coeff.to_string(),
            integer_offset: d.integer_offset.to_string(),
            m_coeff: m_coeff.to_string(),
            bracket: [fb.bracket.lower.to_string(), fb.bracket.upper.to_string()],
            tie: fb.bracket.tie,
            max_partial_quotient: fb.max_partial_quotient.to_string(),
            w_bound: fb.w_bound.to_string(),
        }
    } else {
        let inst = ReductionInstance::new(
            cf.clone(),
            shift_mu(shifts),
            Expr::int(a_const),
            alpha,
            m_big.clone(),
        )
        .map_err(|e| e.to_string())?;
        let out = dujella_petho(&inst, policy).map_err(|e| format!("shifts {shifts:?}: {e}"))?;
        ReductionRecord::DujellaPetho {
            convergent_index: out.convergent_index.to_string(),
            q_used: out.q_used.to_string(),
            precision_bits: out.precision_bits.to_string(),
            mu: RealRecord::new(&out.mu, REAL_DIGITS),
            epsilon: RealRecord::new(&out.epsilon, REAL_DIGITS),
            epsilon_lower: out.epsilon_lower,
            w_bound: out.w_bound.to_string(),
        }
    };
    Ok(RoundRecord {
        shifts: shifts.iter().map(|x| x.to_string()).collect(),
        log_eta3_below_one: below,
        reduction,
    })
}

/// Shift pairs for the last round, in lexicographic order.
pub fn round3_pairs(s1: u64, s2: u64) -> Vec<[u64; 2]> {
    (0..=s1)
        .flat_map(|x1| (x1..=s2).map(move |x2| [x1, x2]))
        .collect()
}

fn max_bound(records: &[RoundRecord]) -> Result<BigInt, String> {
    records
        .iter()
        .map(|r| {
            r.reduction
                .w_bound()
                .parse::<BigInt>()
                .map_err(|e| e.to_string())
        })
        .try_fold(BigInt::from(0), |acc, w| w.map(|w| acc.max(w)))
}

fn as_u64(stage: StageName, x: &BigInt) -> Result<u64, StageFailure> {
    u64::try_from(x).or_else(|_| fail(stage, format!("bound {x} does not fit the search")))
}

pub fn coefficient_record(k: &matveev::BoundChainCoefficient) -> CoefficientRecord {
    CoefficientRecord {
        quantity: k.quantity.name().to_string(),
        log_power: k.log_power.to_string(),
        times_log_alpha: k.times_log_alpha,
        value: RealRecord::new(&k.coefficient, REAL_DIGITS),
        upper: k.coefficient.upper_decimal(REAL_DIGITS),
        published_bound: k.published_string(),
        within_bound: k.within_published(),
    }
}

pub fn nonvanishing_records() -> Result<Vec<NonvanishingRecord>, String> {
    let n = CHAIN_MIN_N;
    [
        (LinearForm::First, "first", 0, 0),
        (LinearForm::Second, "second", 1, 0),
        (LinearForm::Third, "third", 1, 1),
    ]
    .into_iter()
    .map(|(form, name, m, l)| {
        matveev::nonvanishing_guard(form, n, m, l, CHAIN_BITS)
            .map(|nv| NonvanishingRecord {
                form: name.to_string(),
                holds: nv.holds,
                note: nv.note,
            })
            .map_err(|e| e.to_string())
    })
    .collect()
}

pub fn bound_chain_record() -> Result<(StageRecord, matveev::BoundChain), String> {
    let chain = matveev::bound_chain().map_err(|e| e.to_string())?;
    let rec = StageRecord::BoundChain {
        precision_bits: CHAIN_BITS.to_string(),
        first_form_coefficient: RealRecord::new(&chain.first_form_coefficient, REAL_DIGITS),
        shared_coefficient: RealRecord::new(&chain.shared_coefficient, REAL_DIGITS),
        second_form_coefficient: RealRecord::new(&chain.second_form_coefficient, REAL_DIGITS),
        third_form_coefficient: RealRecord::new(&chain.third_form_coefficient, REAL_DIGITS),
        coefficients: chain
            .coefficients()
            .iter()
            .map(|k| coefficient_record(k))
            .collect(),
        replacement_holds: chain.replacement_holds,
        fixed_heights_hold: chain.fixed_heights_hold,
        log_eta3_holds: chain.log_eta3_holds,
        nonvanishing: nonvanishing_records()?,
    };
    Ok((rec, chain))
}

pub fn absolute_bound_record(
    chain: &matveev::BoundChain,
    m_big: &BigInt,
) -> Result<(StageRecord, BigInt, bool), String> {
    let k3 = &chain.k3;
    let n_abs =
        matveev::solve_log_bound(&k3.coefficient, k3.log_power).map_err(|e| e.to_string())?;
    let a_bound: BigInt = &n_abs * 2 + 1;
    let holds = &a_bound <= m_big;
    let rec = StageRecord::AbsoluteBound {
        coefficient_upper: k3.coefficient.upper_decimal(REAL_DIGITS),
        log_power: k3.log_power.to_string(),
        n_bound: n_abs.to_string(),
        a_bound: a_bound.to_string(),
        m_big: m_big.to_string(),
        holds,
    };
    Ok((rec, n_abs, holds))
}

/// Empty until the final search has run.
fn discrepancy(found: &[SolutionTuple]) -> Discrepancy {
    if found.is_empty() {
        return Discrepancy {
            missing: Vec::new(),
            extra: Vec::new(),
        };
    }
    Discrepancy {
        missing: LISTED_SOLUTIONS
            .iter()
            .filter(|t| !found.contains(t))
            .map(TupleRecord::from)
            .collect(),
        extra: found
            .iter()
            .filter(|t| !LISTED_SOLUTIONS.contains(t))
            .map(TupleRecord::from)
            .collect(),
    }
}

struct Replay {
    stages: Vec<StageRecord>,
    solutions: Vec<SolutionTuple>,
}

fn replay(
    cfg: &PipelineConfig,
    stop: Option<StageName>,
    out: &mut Replay,
) -> Result<(), StageFailure> {
    let done = |st: StageName| stop == Some(st);

    let st = StageName::EllZero;
    let ell0 = search::case_ell_zero().or_else(|e| fail(st, e))?;
    out.stages.push(StageRecord::EllZero {
        solutions: certificate::tuple_records(&ell0.solutions),
        notes: ell0.notes,
    });
    if done(st) {
        return Ok(());
    }

    let st = StageName::BoundChain;
    let (rec, chain) = bound_chain_record().or_else(|e| fail(st, e))?;
    let nonvanishing_ok = match &rec {
        StageRecord::BoundChain { nonvanishing, .. } => nonvanishing.iter().all(|n| n.holds),
        _ => false,
    };
    out.stages.push(rec);
    if !chain.all_hold() {
        return fail(st, "a bound-chain inequality is not certified");
    }
    if !nonvanishing_ok {
        return fail(st, "a nonvanishing check failed");
    }
    if done(st) {
        return Ok(());
    }

    let st = StageName::AbsoluteBound;
    let (rec, n_abs, holds) = absolute_bound_record(&chain, &cfg.m_big).or_else(|e| fail(st, e))?;
    out.stages.push(rec);
    if !holds {
        return fail(st, format!("2 * {n_abs} + 1 exceeds M = {}", cfg.m_big));
    }
    if done(st) {
        return Ok(());
    }

    let cf =
        Arc::new(gamma_expansion(&cfg.precision).or_else(|e| fail(StageName::ReduceNMinusM, e))?);

    let st = StageName::ReduceNMinusM;
    let record = reduce_shift_set(&cf, &[], A_ROUND_1, &cfg.m_big, &cfg.precision)
        .or_else(|e| fail(st, e))?;
    let s1_big: BigInt = record.reduction.w_bound().parse().expect("own integer");
    out.stages.push(StageRecord::ReduceNMinusM {
        a_constant: A_ROUND_1.to_string(),
        m_big: cfg.m_big.to_string(),
        record,
        bound: s1_big.to_string(),
    });
    let s1 = as_u64(st, &s1_big)?;
    if s1 > cfg.shift_cap_nm {
        return fail(
            st,
            format!("bound {s1} exceeds the shift cap {}", cfg.shift_cap_nm),
        );
    }
    if done(st) {
        return Ok(());
    }

    let st = StageName::ReduceNMinusEll;
    let records: Vec<RoundRecord> = (0..=s1)
        .into_par_iter()
        .map(|x| reduce_shift_set(&cf, &[x], A_ROUND_2, &cfg.m_big, &cfg.precision))
        .collect::<Result<_, _>>()
        .or_else(|e| fail(st, e))?;
    let s2_big = max_bound(&records).or_else(|e| fail(st, e))?;
    out.stages.push(StageRecord::ReduceNMinusEll {
        a_constant: A_ROUND_2.to_string(),
        shift_range: s1.to_string(),
        records,
        bound: s2_big.to_string(),
    });
    let s2 = as_u64(st, &s2_big)?;
    if done(st) {
        return Ok(());
    }

    let st = StageName::ReduceN;
    let records: Vec<RoundRecord> = round3_pairs(s1, s2)
        .into_par_iter()
        .map(|p| reduce_shift_set(&cf, &p, A_ROUND_3, &cfg.m_big, &cfg.precision))
        .collect::<Result<_, _>>()
        .or_else(|e| fail(st, e))?;
    let s3_big = max_bound(&records).or_else(|e| fail(st, e))?;
    let s3 = as_u64(st, &s3_big)?;
    // every solution with n > threshold would need n < s3 <= threshold + 1
    let below_threshold = s3 <= cfg.n_threshold + 1;
    out.stages.push(StageRecord::ReduceN {
        a_constant: A_ROUND_3.to_string(),
        records,
        bound: s3_big.to_string(),
        below_threshold,
    });
    if done(st) {
        return Ok(());
    }

    let st = StageName::BruteForce;
    let threshold = s3.max(cfg.n_threshold);
    let found = search::brute_force(threshold);
    out.stages.push(StageRecord::BruteForce {
        threshold: threshold.to_string(),
        solutions: certificate::tuple_records(&found),
    });
    out.solutions = found.clone();
    if found.iter().any(|t| !search::verify_solution(t)) {
        return fail(st, "a reported tuple fails exact re-evaluation");
    }
    let expected = cfg.expected.solutions();
    if found != expected {
        let extra: Vec<String> = found
            .iter()
            .filter(|t| !expected.contains(t))
            .map(|t| t.to_string())
            .collect();
        let missing: Vec<String> = expected
            .iter()
            .filter(|t| !found.contains(t))
            .map(|t| t.to_string())
            .collect();
        return fail(
            st,
            format!(
                "search differs from the {} set: extra [{}], missing [{}]",
                cfg.expected.name(),
                extra.join(", "),
                missing.join(", ")
            ),
        );
    }
    Ok(())
}

fn assemble(cfg: &PipelineConfig, stop: Option<StageName>) -> Certificate {
    let mut r = Replay {
        stages: Vec::new(),
        solutions: Vec::new(),
    };
    let verdict = match cfg.validate() {
        Err(e) => Verdict::Failed {
            stage: "config".into(),
            reason: e,
        },
        Ok(()) => match (replay(cfg, stop, &mut r), stop) {
            (Err(f), _) => Verdict::Failed {
                stage: f.stage.name().into(),
                reason: f.reason,
            },
            (Ok(()), Some(st)) if st != StageName::BruteForce => Verdict::Failed {
                stage: st.name().into(),
                reason: "run stopped after this stage".into(),
            },
            (Ok(()), _) => Verdict::Verified,
        },
    };
    Certificate {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        precision_policy: PolicyRecord {
            initial_bits: cfg.precision.initial_bits.to_string(),
            max_bits: cfg.precision.max_bits.to_string(),
            growth_factor: cfg.precision.growth_factor.to_string(),
        },
        config: ConfigRecord {
            n_threshold: cfg.n_threshold.to_string(),
            m_big: cfg.m_big.to_string(),
            shift_cap_nm: cfg.shift_cap_nm.to_string(),
            expected: cfg.expected.name().to_string(),
        },
        final_solution_set: certificate::tuple_records(&r.solutions),
        listed_discrepancy: discrepancy(&r.solutions),
        stages: r.stages,
        verdict,
    }
}

/// Runs every stage. Any failure is reported in the verdict, never as a
/// partial success.
pub fn run_pipeline(cfg: &PipelineConfig) -> Certificate {
    assemble(cfg, None)
}

/// Runs the stages up to and including `stage`. Unless `stage` is the last
/// one, the verdict records the early stop as a failure.
pub fn run_stage(cfg: &PipelineConfig, stage: StageName) -> Certificate {
    assemble(cfg, Some(stage))
}

/// `M` written like `4e43`, as accepted on the command line.
pub fn parse_m_big(s: &str) -> Option<BigInt> {
    decimal::parse_integer(s).filter(|m| m.is_positive())
}
