//! Height bookkeeping and Matveev's lower bound for the three linear forms
//! `2^(a+1) · alpha^-n · eta_3 - 1`, and the chain of coefficients that turns
//! them into an absolute bound on `n`.
//!
//! Every coefficient is a [`CertifiedReal`]; comparisons use the upper
//! endpoint so the resulting inequalities stay valid.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bigreal::{CertifiedReal, Constant, Dyadic, RealError};
use crate::pell;

/// Working precision for the bound chain.
pub const CHAIN_BITS: u32 = 256;
/// Smallest `n` not covered by the direct search; the chain assumes `n >= 151`.
pub const CHAIN_MIN_N: u64 = 151;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatveevError {
    #[error("invalid Matveev instance: {0}")]
    InvalidInstance(String),
    #[error("expected one or two shifts, got {0}")]
    BadShifts(usize),
    #[error("A_3 = {a3} does not dominate max(2h, |log eta|, 0.16) = {needed}")]
    A3TooSmall { a3: String, needed: String },
    #[error("no certified threshold below 10^60 for C = {c}, k = {k}")]
    NoConvergence { c: String, k: u32 },
    #[error(transparent)]
    Real(#[from] RealError),
}

fn ratio(n: i64, d: i64, bits: u32) -> CertifiedReal {
    CertifiedReal::from_ratio(n, d, bits)
}

fn cst(c: Constant, bits: u32) -> Result<CertifiedReal, RealError> {
    CertifiedReal::constant(c, bits)
}

/// Parameters of one application of Matveev's theorem.
#[derive(Clone, Debug)]
pub struct MatveevInstance {
    pub t: u32,
    pub degree: u32,
    pub heights: Vec<CertifiedReal>,
    pub b_bound: CertifiedReal,
}

impl MatveevInstance {
    pub fn new(
        degree: u32,
        heights: Vec<CertifiedReal>,
        b_bound: CertifiedReal,
    ) -> Result<Self, MatveevError> {
        let inst = MatveevInstance {
            t: heights.len() as u32,
            degree,
            heights,
            b_bound,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), MatveevError> {
        if self.t == 0 || self.t as usize != self.heights.len() {
            return Err(MatveevError::InvalidInstance(format!(
                "t = {} but {} height parameters",
                self.t,
                self.heights.len()
            )));
        }
        if self.degree == 0 {
            return Err(MatveevError::InvalidInstance(
                "degree must be positive".into(),
            ));
        }
        let floor = ratio(16, 100, 64);
        for (i, a) in self.heights.iter().enumerate() {
            if a.lower() < floor.upper() {
                return Err(MatveevError::InvalidInstance(format!(
                    "A_{} = {} not certified >= 0.16",
                    i + 1,
                    a
                )));
            }
        }
        if self.b_bound.lower() < Dyadic::from_int(1) {
            return Err(MatveevError::InvalidInstance(format!(
                "B = {} below 1",
                self.b_bound
            )));
        }
        Ok(())
    }
}

/// `1.4 · 30^(t+3) · t^4.5 · D^2 · (1 + log D) · A_1 ⋯ A_t`, everything in the
/// exponent except the `(1 + log B)` factor.
pub fn matveev_prefactor(
    t: u32,
    degree: u32,
    heights: &[CertifiedReal],
    bits: u32,
) -> Result<CertifiedReal, RealError> {
    let t_r = CertifiedReal::from_int(t, bits);
    let t_pow = t_r.pow_int(4)?.mul(&t_r.sqrt()?);
    let d = CertifiedReal::from_int(degree, bits);
    let one = CertifiedReal::from_int(1, bits);
    let mut e = ratio(14, 10, bits)
        .mul(&CertifiedReal::from_int(30, bits).pow_int(t as i64 + 3)?)
        .mul(&t_pow)
        .mul(&d.pow_int(2)?)
        .mul(&one.add(&d.ln()?));
    for a in heights {
        e = e.mul(a);
    }
    Ok(e)
}

/// `E` such that `|Lambda| > exp(-E)`.
pub fn matveev_exponent(inst: &MatveevInstance, bits: u32) -> Result<CertifiedReal, MatveevError> {
    inst.validate()?;
    let pre = matveev_prefactor(inst.t, inst.degree, &inst.heights, bits)?;
    let one = CertifiedReal::from_int(1, bits);
    Ok(pre.mul(&one.add(&inst.b_bound.with_bits(bits).ln()?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedAlgebraic {
    Two,
    Alpha,
    Sqrt2,
}

/// Absolute logarithmic height: `h(2) = log 2`, `h(alpha) = log(alpha)/2`,
/// `h(sqrt 2) = log(2)/2`.
pub fn height_of_named(eta: NamedAlgebraic, bits: u32) -> Result<CertifiedReal, RealError> {
    match eta {
        NamedAlgebraic::Two => cst(Constant::Log2, bits),
        NamedAlgebraic::Alpha => {
            cst(Constant::LogAlpha, bits)?.div(&CertifiedReal::from_int(2, bits))
        }
        NamedAlgebraic::Sqrt2 => cst(Constant::LogSqrt2, bits),
    }
}

/// Upper bound for `h(eta_3)`: `log(2 sqrt2) + x log(alpha)/2` for one shift,
/// `log(4 sqrt2) + (x1 + x2) log(alpha)/2` for two.
pub fn height_bound_eta3(shifts: &[u64], bits: u32) -> Result<CertifiedReal, MatveevError> {
    let base = match shifts.len() {
        1 => CertifiedReal::from_int(1, bits),
        2 => CertifiedReal::from_int(2, bits),
        n => return Err(MatveevError::BadShifts(n)),
    };
    let log2 = cst(Constant::Log2, bits)?;
    let half_log_alpha = cst(Constant::LogAlpha, bits)?.div(&CertifiedReal::from_int(2, bits))?;
    let total: u64 = shifts.iter().sum();
    // log(2^base · sqrt2) = (base + 1/2) log 2
    let head = log2.mul(&base.add(&ratio(1, 2, bits)));
    Ok(head.add(&half_log_alpha.mul_int(&BigInt::from(total))))
}

/// `A_3 = 3 + x log(alpha)` (one shift) or `4 + (x1 + x2) log(alpha)` (two).
/// Checks that it dominates `max(2 h(eta_3), |log eta_3|, 0.16)`, using
/// `|log eta_3| < 1`.
pub fn a3_parameter(shifts: &[u64], bits: u32) -> Result<CertifiedReal, MatveevError> {
    let head = match shifts.len() {
        1 => 3,
        2 => 4,
        n => return Err(MatveevError::BadShifts(n)),
    };
    let total: u64 = shifts.iter().sum();
    let a3 = CertifiedReal::from_int(head, bits)
        .add(&cst(Constant::LogAlpha, bits)?.mul_int(&BigInt::from(total)));
    let two_h = height_bound_eta3(shifts, bits)?.mul_int(&BigInt::from(2));
    let one = CertifiedReal::from_int(1, bits);
    let needed = if two_h.upper() > one.upper() {
        two_h
    } else {
        one
    };
    if !needed.certainly_lt(&a3) {
        return Err(MatveevError::A3TooSmall {
            a3: a3.to_string(),
            needed: needed.to_string(),
        });
    }
    Ok(a3)
}

/// Which side of the chain a coefficient bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    NMinusM,
    NMinusEll,
    N,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::NMinusM => "n_minus_m",
            Quantity::NMinusEll => "n_minus_ell",
            Quantity::N => "n",
        }
    }
}

/// A certified statement `lhs < C · (log n)^k` valid for `n >= 151`, where
/// `lhs` is `quantity · log(alpha)` when `times_log_alpha` is set and the
/// bare quantity otherwise.
#[derive(Clone, Debug)]
pub struct BoundChainCoefficient {
    pub quantity: Quantity,
    pub coefficient: CertifiedReal,
    pub log_power: u32,
    pub times_log_alpha: bool,
    /// The rounded constant the coefficient must not exceed, as `(mantissa/10, exponent)`,
    /// e.g. `(18, 12)` for `1.8e12`.
    pub published: (u32, u32),
}

impl BoundChainCoefficient {
    pub fn published_value(&self) -> BigInt {
        BigInt::from(self.published.0)
            * num_traits::pow(BigInt::from(10), self.published.1 as usize)
            / 10
    }

    pub fn published_string(&self) -> String {
        let (m, e) = self.published;
        if m % 10 == 0 {
            format!("{}e{}", m / 10, e)
        } else {
            format!("{}.{}e{}", m / 10, m % 10, e)
        }
    }

    /// Certified `coefficient <= published`.
    pub fn within_published(&self) -> bool {
        self.coefficient.upper().to_rational() <= BigRational::from_integer(self.published_value())
    }
}

/// The full coefficient chain with its auxiliary checks.
#[derive(Clone, Debug)]
pub struct BoundChain {
    /// `2 · prefactor(A_1, A_2, A_3)` for the first form.
    pub first_form_coefficient: CertifiedReal,
    /// `2 · prefactor(A_1, A_2)`, multiplied later by the variable `A_3`.
    pub shared_coefficient: CertifiedReal,
    /// `shared + log 5 / (3 log 151)`; must stay below 2.5e12.
    pub second_form_coefficient: CertifiedReal,
    /// `shared + log 2 / (4 log 151)`; must stay below 2.5e12.
    pub third_form_coefficient: CertifiedReal,
    pub k1: BoundChainCoefficient,
    pub k2: BoundChainCoefficient,
    pub k3: BoundChainCoefficient,
    /// `1 + log(2n + 1) < 2 log n` at `n = 151`.
    pub replacement_holds: bool,
    /// `D h(eta_i) <= A_i` for the fixed heights 1.4, 0.9, 0.7.
    pub fixed_heights_hold: bool,
    /// `|log eta_3| < 1` over the full ranges of both variable forms.
    pub log_eta3_holds: bool,
}

impl BoundChain {
    pub fn coefficients(&self) -> [&BoundChainCoefficient; 3] {
        [&self.k1, &self.k2, &self.k3]
    }

    pub fn all_hold(&self) -> bool {
        self.replacement_holds
            && self.fixed_heights_hold
            && self.log_eta3_holds
            && self.coefficients().iter().all(|k| k.within_published())
            && self.second_form_coefficient.upper().to_rational()
                <= BigRational::from_integer(
                    BigInt::from(25) * num_traits::pow(BigInt::from(10), 11),
                )
            && self.third_form_coefficient.upper().to_rational()
                <= BigRational::from_integer(
                    BigInt::from(25) * num_traits::pow(BigInt::from(10), 11),
                )
    }
}

pub fn bound_chain() -> Result<BoundChain, MatveevError> {
    bound_chain_at(CHAIN_BITS)
}

pub fn bound_chain_at(bits: u32) -> Result<BoundChain, MatveevError> {
    let a1 = ratio(14, 10, bits);
    let a2 = ratio(9, 10, bits);
    let a3_fixed = ratio(7, 10, bits);
    let two = CertifiedReal::from_int(2, bits);

    let fixed_heights_hold = [
        (NamedAlgebraic::Two, &a1),
        (NamedAlgebraic::Alpha, &a2),
        (NamedAlgebraic::Sqrt2, &a3_fixed),
    ]
    .iter()
    .map(|(eta, a)| height_of_named(*eta, bits).map(|h| h.mul(&two).upper() <= a.lower()))
    .collect::<Result<Vec<_>, _>>()?
    .into_iter()
    .all(|ok| ok);

    let log_n0 = CertifiedReal::from_int(CHAIN_MIN_N, bits).ln()?;
    let replacement = CertifiedReal::from_int(1, bits)
        .add(&CertifiedReal::from_int(2 * CHAIN_MIN_N + 1, bits).ln()?);
    let replacement_holds = replacement.certainly_lt(&log_n0.mul(&two));

    let log_alpha = cst(Constant::LogAlpha, bits)?;
    let first = matveev_prefactor(3, 2, &[a1.clone(), a2.clone(), a3_fixed], bits)?.mul(&two);
    let shared = matveev_prefactor(3, 2, &[a1, a2], bits)?.mul(&two);

    // (n - m) log alpha < first · log n + log 8 <= K1 log n
    let log8 = cst(Constant::Log2, bits)?.mul_int(&BigInt::from(3));
    let k1 = first.add(&log8.div(&log_n0)?);

    // (n - l) log alpha < c2 · log n · A3 with A3 >= 3
    let log5 = CertifiedReal::from_int(5, bits).ln()?;
    let c2 = shared.add(&log5.div(&log_n0.mul_int(&BigInt::from(3)))?);
    // A3 = 3 + (n - m) log alpha < (3 / log 151 + K1) log n
    let k2 = c2.mul(&CertifiedReal::from_int(3, bits).div(&log_n0)?.add(&k1));

    // n log alpha < c3 · log n · (4 + (n-m) log alpha + (n-l) log alpha)
    let log2 = cst(Constant::Log2, bits)?;
    let c3 = shared.add(&log2.div(&log_n0.mul_int(&BigInt::from(4)))?);
    let inner = CertifiedReal::from_int(4, bits)
        .div(&log_n0.pow_int(2)?)?
        .add(&k1.div(&log_n0)?)
        .add(&k2);
    let k3 = c3.mul(&inner).div(&log_alpha)?;

    let log_eta3_holds = log_eta3_range_holds(bits)?;

    Ok(BoundChain {
        first_form_coefficient: first,
        shared_coefficient: shared,
        second_form_coefficient: c2,
        third_form_coefficient: c3,
        k1: BoundChainCoefficient {
            quantity: Quantity::NMinusM,
            coefficient: k1,
            log_power: 1,
            times_log_alpha: true,
            published: (18, 12),
        },
        k2: BoundChainCoefficient {
            quantity: Quantity::NMinusEll,
            coefficient: k2,
            log_power: 2,
            times_log_alpha: true,
            published: (50, 24),
        },
        k3: BoundChainCoefficient {
            quantity: Quantity::N,
            coefficient: k3,
            log_power: 3,
            times_log_alpha: false,
            published: (17, 37),
        },
        replacement_holds,
        fixed_heights_hold,
        log_eta3_holds,
    })
}

/// `eta_3 = sqrt2 / (1 + alpha^-x)` lies in `[sqrt2/2, sqrt2)` and
/// `sqrt2 / (1 + alpha^-x1 + alpha^-x2)` in `[sqrt2/3, sqrt2)`; both logs
/// stay below 1 in absolute value.
fn log_eta3_range_holds(bits: u32) -> Result<bool, RealError> {
    let sqrt2 = cst(Constant::Sqrt2, bits)?;
    let one = CertifiedReal::from_int(1, bits);
    let mut ok = true;
    for denom in [1i64, 2, 3] {
        let l = sqrt2
            .div(&CertifiedReal::from_int(denom, bits))?
            .ln()?
            .abs();
        ok &= l.certainly_lt(&one);
    }
    Ok(ok)
}

/// `|log eta_3| < 1` for explicit shifts, with `eta_3 = sqrt2 / (1 + sum alpha^-x_i)`.
pub fn log_eta3_below_one(shifts: &[u64], bits: u32) -> Result<bool, RealError> {
    let alpha = cst(Constant::Alpha, bits)?;
    let mut denom = CertifiedReal::from_int(1, bits);
    for &x in shifts {
        denom = denom.add(&alpha.pow_int(-(x as i64))?);
    }
    let eta = cst(Constant::Sqrt2, bits)?.div(&denom)?;
    Ok(eta
        .ln()?
        .abs()
        .certainly_lt(&CertifiedReal::from_int(1, bits)))
}

/// Least integer `N` such that `x < C (log x)^k` forces `x < N`.
///
/// For `k >= 1` the map `x -> x^(1/k) / log x` increases on `x > e^k`, so the
/// predicate `x >= C (log x)^k` is monotone there; `N` is found by bisection
/// over integers in `[ceil(2.72^k), 10^60]`.
pub fn solve_log_bound(c: &CertifiedReal, k: u32) -> Result<BigInt, MatveevError> {
    if !c.is_positive() {
        return Err(MatveevError::InvalidInstance("C must be positive".into()));
    }
    if k == 0 {
        return Ok(c.upper().ceil());
    }
    let bits = 192;
    let c_up = CertifiedReal::from_dyadic(c.upper(), bits);
    let holds = |x: &BigInt| -> Result<bool, RealError> {
        let lx = CertifiedReal::from_int(x.clone(), bits).ln()?;
        let rhs = c_up.mul(&lx.pow_int(k as i64)?);
        Ok(rhs.certainly_lt(&CertifiedReal::from_int(x.clone(), bits)))
    };
    let e_k = BigRational::new(BigInt::from(272), BigInt::from(100));
    let lo_start = num_traits::pow(e_k, k as usize).ceil().to_integer();
    let hi_start = num_traits::pow(BigInt::from(10), 60);
    if !holds(&hi_start)? {
        return Err(MatveevError::NoConvergence {
            c: c.to_string(),
            k,
        });
    }
    if holds(&lo_start)? {
        return Ok(lo_start);
    }
    // invariant: !holds(lo), holds(hi)
    let (mut lo, mut hi) = (lo_start, hi_start);
    let mut iters = 0;
    while &hi - &lo > BigInt::one() {
        iters += 1;
        if iters > 256 {
            return Err(MatveevError::NoConvergence {
                c: c.to_string(),
                k,
            });
        }
        let mid: BigInt = (&lo + &hi) >> 1u32;
        if holds(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Which linear form a nonvanishing argument concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearForm {
    /// `2^(a+1) alpha^-n sqrt2 - 1`
    First,
    /// `2^(a+1) alpha^-n sqrt2 (1 + alpha^(m-n))^-1 - 1`
    Second,
    /// `2^(a+1) alpha^-n sqrt2 (1 + alpha^(m-n) + alpha^(l-n))^-1 - 1`
    Third,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonvanishingNote {
    pub form: LinearForm,
    pub holds: bool,
    pub note: String,
}

/// Re-checks the argument that the given form cannot vanish.
///
/// The first form vanishing would make `alpha^(2n)` rational, which fails
/// because its `sqrt2` coordinate `P_(2n)` is nonzero. The other two would
/// force `alpha^n <= |beta|^n + |beta|^m (+ |beta|^l) < 1` after conjugation;
/// that numeric inequality is certified for the given indices.
pub fn nonvanishing_guard(
    form: LinearForm,
    n: u64,
    m: u64,
    ell: u64,
    bits: u32,
) -> Result<NonvanishingNote, RealError> {
    let one = CertifiedReal::from_int(1, bits);
    let alpha_n = cst(Constant::Alpha, bits)?.pow_int(n as i64)?;
    let beta_abs = cst(Constant::Beta, bits)?.abs();
    let beta_sum = |exps: &[u64]| -> Result<CertifiedReal, RealError> {
        let mut s = CertifiedReal::from_int(0, bits);
        for &e in exps {
            s = s.add(&beta_abs.pow_int(e as i64)?);
        }
        Ok(s)
    };
    Ok(match form {
        LinearForm::First => {
            let holds = n >= 1 && !pell::pell(2 * n).is_zero();
            NonvanishingNote {
                form,
                holds,
                note: format!(
                    "vanishing forces alpha^(2n) = 2^(2a+3) in Z; alpha^{} = Q/2 + P*sqrt2 with P = P_{} != 0",
                    2 * n,
                    2 * n
                ),
            }
        }
        LinearForm::Second => {
            let s = beta_sum(&[n, m])?;
            let holds = s.certainly_lt(&one) && one.certainly_lt(&alpha_n);
            NonvanishingNote {
                form,
                holds,
                note: format!(
                    "conjugation gives alpha^n + alpha^m = |beta^n + beta^m|; certified |beta|^{n} + |beta|^{m} < 1 < alpha^{n}"
                ),
            }
        }
        LinearForm::Third => {
            let s = beta_sum(&[n, m, ell])?;
            let holds = s.certainly_lt(&one) && one.certainly_lt(&alpha_n);
            NonvanishingNote {
                form,
                holds,
                note: format!(
                    "conjugation gives alpha^n + alpha^m + alpha^l = |beta^n + beta^m + beta^l|; certified |beta|^{n} + |beta|^{m} + |beta|^{ell} < 1 < alpha^{n}"
                ),
            }
        }
    })
}
