//! Certificate schema and its JSON and text renderings.
//!
//! Integers are decimal strings and reals are `{midpoint, radius}` pairs of
//! decimal strings, so two implementations can compare certificates byte
//! for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bigreal::CertifiedReal;
use crate::search::SolutionTuple;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealRecord {
    pub midpoint: String,
    pub radius: String,
}

impl RealRecord {
    pub fn new(x: &CertifiedReal, sig: usize) -> Self {
        RealRecord {
            midpoint: x.midpoint_decimal(sig),
            radius: x.printed_radius(sig),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleRecord {
    pub n: String,
    pub m: String,
    pub ell: String,
    pub a: String,
}

impl From<&SolutionTuple> for TupleRecord {
    fn from(t: &SolutionTuple) -> Self {
        TupleRecord {
            n: t.n.to_string(),
            m: t.m.to_string(),
            ell: t.ell.to_string(),
            a: t.a.to_string(),
        }
    }
}

impl TupleRecord {
    pub fn to_tuple(&self) -> Option<SolutionTuple> {
        Some(SolutionTuple::new(
            self.n.parse().ok()?,
            self.m.parse().ok()?,
            self.ell.parse().ok()?,
            self.a.parse().ok()?,
        ))
    }
}

pub fn tuple_records(ts: &[SolutionTuple]) -> Vec<TupleRecord> {
    ts.iter().map(TupleRecord::from).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyRecord {
    pub initial_bits: String,
    pub max_bits: String,
    pub growth_factor: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub n_threshold: String,
    pub m_big: String,
    pub shift_cap_nm: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub quantity: String,
    pub log_power: String,
    pub times_log_alpha: bool,
    pub value: RealRecord,
    pub upper: String,
    pub published_bound: String,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonvanishingRecord {
    pub form: String,
    pub holds: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ReductionRecord {
    DujellaPetho {
        convergent_index: String,
        q_used: String,
        precision_bits: String,
        mu: RealRecord,
        epsilon: RealRecord,
        epsilon_lower: String,
        w_bound: String,
    },
    LegendreFallback {
        gamma_coeff: String,
        integer_offset: String,
        m_coeff: String,
        bracket: [String; 2],
        tie: bool,
        max_partial_quotient: String,
        w_bound: String,
    },
}

impl ReductionRecord {
    pub fn w_bound(&self) -> &str {
        match self {
            ReductionRecord::DujellaPetho { w_bound, .. }
            | ReductionRecord::LegendreFallback { w_bound, .. } => w_bound,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            ReductionRecord::DujellaPetho { .. } => "dujella_petho",
            ReductionRecord::LegendreFallback { .. } => "legendre_fallback",
        }
    }
}

/// One reduced inequality; `shifts` is empty for the first round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub shifts: Vec<String>,
    pub log_eta3_below_one: bool,
    pub reduction: ReductionRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageRecord {
    EllZero {
        solutions: Vec<TupleRecord>,
        notes: Vec<String>,
    },
    BoundChain {
        precision_bits: String,
        first_form_coefficient: RealRecord,
        shared_coefficient: RealRecord,
        second_form_coefficient: RealRecord,
        third_form_coefficient: RealRecord,
        coefficients: Vec<CoefficientRecord>,
        replacement_holds: bool,
        fixed_heights_hold: bool,
        log_eta3_holds: bool,
        nonvanishing: Vec<NonvanishingRecord>,
    },
    AbsoluteBound {
        coefficient_upper: String,
        log_power: String,
        n_bound: String,
        a_bound: String,
        m_big: String,
        holds: bool,
    },
    ReduceNMinusM {
        a_constant: String,
        m_big: String,
        record: RoundRecord,
        bound: String,
    },
    ReduceNMinusEll {
        a_constant: String,
        shift_range: String,
        records: Vec<RoundRecord>,
        bound: String,
    },
    ReduceN {
        a_constant: String,
        records: Vec<RoundRecord>,
        bound: String,
        below_threshold: bool,
    },
    BruteForce {
        threshold: String,
        solutions: Vec<TupleRecord>,
    },
}

impl StageRecord {
    pub fn name(&self) -> &'static str {
        match self {
            StageRecord::EllZero { .. } => "ell_zero",
            StageRecord::BoundChain { .. } => "bound_chain",
            StageRecord::AbsoluteBound { .. } => "absolute_bound",
            StageRecord::ReduceNMinusM { .. } => "reduce_n_minus_m",
            StageRecord::ReduceNMinusEll { .. } => "reduce_n_minus_ell",
            StageRecord::ReduceN { .. } => "reduce_n",
            StageRecord::BruteForce { .. } => "brute_force",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Failed { stage: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub missing: Vec<TupleRecord>,
    pub extra: Vec<TupleRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub tool_version: String,
    pub precision_policy: PolicyRecord,
    pub config: ConfigRecord,
    pub stages: Vec<StageRecord>,
    pub final_solution_set: Vec<TupleRecord>,
    /// Difference between the final set and the commonly listed eight solutions.
    pub listed_discrepancy: Discrepancy,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(format!("unknown format {other:?} (expected json or text)")),
        }
    }
}

pub fn emit_report(cert: &Certificate, fmt: OutputFormat) -> Vec<u8> {
    match fmt {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(cert).expect("certificate serializes");
            out.push(b'\n');
            out
        }
        OutputFormat::Text => render_text(cert).into_bytes(),
    }
}

fn tuples_line(ts: &[TupleRecord]) -> String {
    if ts.is_empty() {
        return "none".into();
    }
    ts.iter()
        .map(|t| format!("({}, {}, {}, {})", t.n, t.m, t.ell, t.a))
        .collect::<Vec<_>>()
        .join(", ")
}

fn round_line(r: &RoundRecord) -> String {
    let shifts = if r.shifts.is_empty() {
        String::new()
    } else {
        format!("shifts [{}] ", r.shifts.join(", "))
    };
    match &r.reduction {
        ReductionRecord::DujellaPetho {
            convergent_index,
            epsilon_lower,
            w_bound,
            ..
        } => format!("{shifts}q_{convergent_index}, eps >= {epsilon_lower}, bound {w_bound}"),
        ReductionRecord::LegendreFallback {
            gamma_coeff,
            m_coeff,
            max_partial_quotient,
            w_bound,
            ..
        } => format!(
            "{shifts}fallback (gamma coefficient {gamma_coeff}, x <= {m_coeff}, a_M = {max_partial_quotient}), bound {w_bound}"
        ),
    }
}

fn render_text(c: &Certificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "pellsum {} certificate", c.tool_version);
    let _ = writeln!(
        s,
        "precision {}..{} bits (x{}), M = {}, threshold {}",
        c.precision_policy.initial_bits,
        c.precision_policy.max_bits,
        c.precision_policy.growth_factor,
        c.config.m_big,
        c.config.n_threshold
    );
    for stage in &c.stages {
        let _ = writeln!(s, "\n== {} ==", stage.name());
        match stage {
            StageRecord::EllZero { solutions, notes } => {
                for n in notes {
                    let _ = writeln!(s, "  - {n}");
                }
                let _ = writeln!(s, "  solutions: {}", tuples_line(solutions));
            }
            StageRecord::BoundChain {
                coefficients,
                replacement_holds,
                fixed_heights_hold,
                log_eta3_holds,
                nonvanishing,
                ..
            } => {
                for k in coefficients {
                    let lhs = if k.times_log_alpha {
                        format!("{} log(alpha)", k.quantity)
                    } else {
                        k.quantity.clone()
                    };
                    let _ = writeln!(
                        s,
                        "  {lhs} < {} (log n)^{}  [<= {}: {}]",
                        k.value.midpoint, k.log_power, k.published_bound, k.within_bound
                    );
                }
                let _ = writeln!(
                    s,
                    "  1 + log(2n+1) < 2 log n at n = 151: {replacement_holds}"
                );
                let _ = writeln!(
                    s,
                    "  D h(eta_i) <= A_i for fixed heights: {fixed_heights_hold}"
                );
                let _ = writeln!(s, "  |log eta_3| < 1: {log_eta3_holds}");
                for nv in nonvanishing {
                    let _ = writeln!(s, "  {} nonzero: {} ({})", nv.form, nv.holds, nv.note);
                }
            }
            StageRecord::AbsoluteBound {
                n_bound,
                a_bound,
                m_big,
                holds,
                ..
            } => {
                let _ = writeln!(s, "  n < {n_bound}");
                let _ = writeln!(s, "  a < 2n + 1 < {a_bound} <= M = {m_big}: {holds}");
            }
            StageRecord::ReduceNMinusM { record, bound, .. } => {
                let _ = writeln!(s, "  {}", round_line(record));
                let _ = writeln!(s, "  n - m < {bound}");
            }
            StageRecord::ReduceNMinusEll {
                records,
                bound,
                shift_range,
                ..
            } => {
                let _ = writeln!(s, "  {} shifts in [0, {shift_range}]", records.len());
                for r in records
                    .iter()
                    .filter(|r| r.reduction.method() == "legendre_fallback")
                {
                    let _ = writeln!(s, "  {}", round_line(r));
                }
                let _ = writeln!(s, "  n - l < {bound}");
            }
            StageRecord::ReduceN {
                records,
                bound,
                below_threshold,
                ..
            } => {
                let _ = writeln!(s, "  {} shift pairs", records.len());
                let _ = writeln!(s, "  n < {bound} (contradicts n > 150: {below_threshold})");
            }
            StageRecord::BruteForce {
                threshold,
                solutions,
            } => {
                let _ = writeln!(s, "  n <= {threshold}: {}", tuples_line(solutions));
            }
        }
    }
    let _ = writeln!(s, "\nsolutions: {}", tuples_line(&c.final_solution_set));
    let _ = writeln!(
        s,
        "not in the listed eight: {}; listed but not found: {}",
        tuples_line(&c.listed_discrepancy.extra),
        tuples_line(&c.listed_discrepancy.missing)
    );
    match &c.verdict {
        Verdict::Verified => {
            let _ = writeln!(s, "verdict: verified");
        }
        Verdict::Failed { stage, reason } => {
            let _ = writeln!(s, "verdict: failed at {stage}: {reason}");
        }
    }
    s
}
