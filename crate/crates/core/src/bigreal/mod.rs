//! Certified arbitrary-precision reals.
//!
//! A [`CertifiedReal`] is a ball `[mid - rad, mid + rad]` with exact dyadic
//! midpoint and radius. Every operation returns a ball that contains the
//! exact result for every choice of points in the argument balls: midpoint
//! rounding error is folded into the radius and radii are always rounded up.

mod constants;
pub mod decimal;
mod dyadic;
mod expr;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

pub use constants::Constant;
pub use dyadic::Dyadic;
pub use expr::{refine, Expr};

/// Significant bits kept in a radius mantissa.
const RADIUS_BITS: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealError {
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("logarithm of an interval that is not strictly positive")]
    LogDomain,
    #[error("square root of an interval that is not strictly positive")]
    SqrtDomain,
    #[error("radius {0} too large to certify a nearest integer")]
    RadiusTooLarge(String),
    #[error("precision exhausted at {bits} bits: radius {radius} above target {target}")]
    PrecisionExhausted {
        bits: u32,
        radius: String,
        target: String,
    },
    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),
    #[error("precision must be at least 16 bits, got {0}")]
    PrecisionTooLow(u32),
}

/// Escalation schedule for re-evaluating an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
    pub growth_factor: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: 192,
            max_bits: 8192,
            growth_factor: 2,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(initial_bits: u32, max_bits: u32, growth_factor: u32) -> Result<Self, RealError> {
        let p = PrecisionPolicy {
            initial_bits,
            max_bits,
            growth_factor,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RealError> {
        if self.initial_bits < 16 {
            return Err(RealError::InvalidPolicy(format!(
                "initial_bits {} below 16",
                self.initial_bits
            )));
        }
        if self.initial_bits > self.max_bits {
            return Err(RealError::InvalidPolicy(format!(
                "initial_bits {} exceeds max_bits {}",
                self.initial_bits, self.max_bits
            )));
        }
        if self.growth_factor < 2 {
            return Err(RealError::InvalidPolicy(format!(
                "growth_factor {} below 2",
                self.growth_factor
            )));
        }
        Ok(())
    }

    /// The precisions tried, in order: initial, initial·g, … capped at max.
    pub fn levels(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut b = self.initial_bits.max(16);
        loop {
            out.push(b.min(self.max_bits));
            if b >= self.max_bits {
                break;
            }
            b = b.saturating_mul(self.growth_factor.max(2));
        }
        out.dedup();
        out
    }

    /// Levels at or above `min_bits`, always including the top level.
    pub fn levels_from(&self, min_bits: u32) -> Vec<u32> {
        let all = self.levels();
        let top = *all.last().expect("nonempty levels");
        let mut out: Vec<u32> = all.into_iter().filter(|&b| b >= min_bits).collect();
        if out.is_empty() {
            out.push(top);
        }
        out
    }
}

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedReal {
    mid: Dyadic,
    rad: Dyadic,
    bits: u32,
}

fn round_rad(r: Dyadic) -> Dyadic {
    r.round_ceil(RADIUS_BITS)
}

impl CertifiedReal {
    /// Builds a ball, rounding the midpoint to `bits` and widening the
    /// radius by the rounding error.
    fn finish(mid: Dyadic, rad: Dyadic, bits: u32) -> CertifiedReal {
        let (m, err) = mid.round_floor(bits);
        CertifiedReal {
            mid: m,
            rad: round_rad(rad.add(&err)),
            bits,
        }
    }

    pub fn from_int(v: impl Into<BigInt>, bits: u32) -> CertifiedReal {
        CertifiedReal::finish(Dyadic::from_int(v), Dyadic::zero(), bits)
    }

    pub fn from_dyadic(d: Dyadic, bits: u32) -> CertifiedReal {
        CertifiedReal::finish(d, Dyadic::zero(), bits)
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> CertifiedReal {
        let (m, err) = Dyadic::from_rational_floor(r, bits + 8);
        CertifiedReal::finish(m, err, bits)
    }

    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>, bits: u32) -> CertifiedReal {
        CertifiedReal::from_rational(&BigRational::new(num.into(), den.into()), bits)
    }

    /// The ball `[lo, hi]` exactly.
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, bits: u32) -> CertifiedReal {
        debug_assert!(lo <= hi);
        let mid = lo.add(hi).shl(-1);
        let rad = hi.sub(lo).shl(-1);
        CertifiedReal::finish(mid, rad, bits)
    }

    pub fn midpoint(&self) -> &Dyadic {
        &self.mid
    }

    pub fn radius(&self) -> &Dyadic {
        &self.rad
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Certified `self > 0`.
    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    /// Certified `self < 0`.
    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lower().to_rational() <= *r && *r <= self.upper().to_rational()
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        self.lower() <= *d && *d <= self.upper()
    }

    /// True when the two balls intersect.
    pub fn overlaps(&self, other: &CertifiedReal) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &CertifiedReal) -> bool {
        self.upper() < other.lower()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Re-rounds the midpoint to a different working precision.
    pub fn with_bits(&self, bits: u32) -> CertifiedReal {
        CertifiedReal::finish(self.mid.clone(), self.rad.clone(), bits)
    }

    pub fn neg(&self) -> CertifiedReal {
        CertifiedReal {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            bits: self.bits,
        }
    }

    pub fn abs(&self) -> CertifiedReal {
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &CertifiedReal) -> CertifiedReal {
        CertifiedReal::finish(
            self.mid.add(&other.mid),
            self.rad.add(&other.rad),
            self.bits.max(other.bits),
        )
    }

    pub fn sub(&self, other: &CertifiedReal) -> CertifiedReal {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CertifiedReal) -> CertifiedReal {
        let mid = self.mid.mul(&other.mid);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        CertifiedReal::finish(mid, round_rad(rad), self.bits.max(other.bits))
    }

    pub fn mul_int(&self, k: &BigInt) -> CertifiedReal {
        let kd = Dyadic::from_int(k.abs());
        CertifiedReal::finish(self.mid.mul_int(k), self.rad.mul(&kd), self.bits)
    }

    pub fn div(&self, other: &CertifiedReal) -> Result<CertifiedReal, RealError> {
        let denom_lo = other.mid.abs().sub(&other.rad);
        if !denom_lo.is_positive() {
            return Err(RealError::DivisionByZero);
        }
        let bits = self.bits.max(other.bits);
        // quotient of midpoints, truncated; error below one unit in its last place
        let q = self.mid.abs().div_down(&other.mid.abs(), bits + 4);
        let q_ulp = Dyadic::pow2(q.msb() - (bits as i64 + 4));
        let q_up = q.add(&q_ulp);
        let negative = self.mid.is_negative() != other.mid.is_negative();
        let q = if negative { q.neg() } else { q };
        // |a/b - ma/mb| <= (ra + |ma/mb| rb) / (|mb| - rb)
        let num = self.rad.add(&q_up.mul(&other.rad));
        let prop = num.div_up(&denom_lo, RADIUS_BITS);
        Ok(CertifiedReal::finish(q, prop.add(&q_ulp), bits))
    }

    pub fn recip(&self) -> Result<CertifiedReal, RealError> {
        CertifiedReal::from_int(1, self.bits).div(self)
    }

    pub fn pow_int(&self, n: i64) -> Result<CertifiedReal, RealError> {
        if n < 0 {
            return self.pow_int(-n)?.recip();
        }
        let mut result = CertifiedReal::from_int(1, self.bits);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn sqrt(&self) -> Result<CertifiedReal, RealError> {
        let lo = self.lower();
        if !lo.is_positive() {
            if self.is_exact() && self.mid.is_zero() {
                return Ok(self.clone());
            }
            return Err(RealError::SqrtDomain);
        }
        let bits = self.bits;
        let (root, ulp) = sqrt_floor(&self.mid, bits + 4);
        if self.rad.is_zero() {
            return Ok(CertifiedReal::finish(root, ulp, bits));
        }
        // |sqrt(x) - sqrt(m)| <= r / sqrt(lo)
        let (lo_root, _) = sqrt_floor(&lo, RADIUS_BITS + 2);
        if !lo_root.is_positive() {
            return Err(RealError::SqrtDomain);
        }
        let prop = self.rad.div_up(&lo_root, RADIUS_BITS);
        Ok(CertifiedReal::finish(root, prop.add(&ulp), bits))
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<CertifiedReal, RealError> {
        let lo = self.lower();
        if !lo.is_positive() {
            return Err(RealError::LogDomain);
        }
        let bits = self.bits;
        let point = constants::ln_point(&self.mid, bits)?;
        if self.rad.is_zero() {
            return Ok(point);
        }
        // |log x - log m| <= r / lo
        let prop = self.rad.div_up(&lo, RADIUS_BITS);
        Ok(CertifiedReal::finish(
            point.mid.clone(),
            point.rad.add(&prop),
            bits,
        ))
    }

    /// Distance to the nearest integer, `‖x‖`.
    ///
    /// When the ball straddles a half-integer the result is the union bound
    /// `[min(‖lo‖, ‖hi‖), 1/2]`.
    pub fn nearest_int_distance(&self) -> Result<CertifiedReal, RealError> {
        let quarter = Dyadic::pow2(-2);
        if self.rad >= quarter {
            return Err(RealError::RadiusTooLarge(self.rad.to_string()));
        }
        let n = Dyadic::from_int(self.mid.round_nearest());
        let lo = self.lower().sub(&n);
        let hi = self.upper().sub(&n);
        let half = Dyadic::pow2(-1);
        let (a, b) = if hi > half {
            // straddles n + 1/2
            let d_hi = Dyadic::from_int(1).sub(&hi);
            (Dyadic::min(&lo.abs(), &d_hi), half)
        } else if lo < half.neg() {
            let d_lo = Dyadic::from_int(1).add(&lo);
            (Dyadic::min(&hi.abs(), &d_lo), half)
        } else if !lo.is_negative() {
            (lo, hi)
        } else if !hi.is_positive() {
            (hi.neg(), lo.neg())
        } else {
            (Dyadic::zero(), Dyadic::max(&lo.abs(), &hi))
        };
        Ok(CertifiedReal::from_bounds(&a, &b, self.bits))
    }

    /// The certified floor, if the ball does not straddle an integer.
    pub fn floor_certified(&self) -> Option<BigInt> {
        let a = self.lower().floor();
        let b = self.upper().floor();
        (a == b).then_some(a)
    }

    /// Decimal rendering of the midpoint with `sig` significant digits.
    pub fn midpoint_decimal(&self, sig: usize) -> String {
        self.mid.to_decimal(sig, decimal::Rounding::Nearest)
    }

    /// A radius that also absorbs the rounding of [`Self::midpoint_decimal`].
    pub fn printed_radius(&self, sig: usize) -> String {
        let shown = decimal::parse_decimal(&self.midpoint_decimal(sig)).expect("own output parses");
        let slack = (shown - self.mid.to_rational()).abs();
        let total = self.rad.to_rational() + slack;
        decimal::format_sci(&total, 4, decimal::Rounding::Ceil)
    }

    /// Lower endpoint rounded down to `sig` decimal digits.
    pub fn lower_decimal(&self, sig: usize) -> String {
        decimal::format_sci(&self.lower().to_rational(), sig, decimal::Rounding::Floor)
    }

    /// Upper endpoint rounded up to `sig` decimal digits.
    pub fn upper_decimal(&self, sig: usize) -> String {
        decimal::format_sci(&self.upper().to_rational(), sig, decimal::Rounding::Ceil)
    }

    /// Certified `ceil` of the upper endpoint, an integer `>=` every point.
    pub fn ceil_upper(&self) -> BigInt {
        self.upper().ceil()
    }
}

/// `floor(sqrt(x))` to about `bits` significant bits, with its ulp.
fn sqrt_floor(x: &Dyadic, bits: u32) -> (Dyadic, Dyadic) {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let man = x.mantissa();
    let mut shift = 2 * bits as i64 + 2 - man.bits() as i64;
    shift = shift.max(0);
    if (x.exponent() - shift) % 2 != 0 {
        shift += 1;
    }
    let scaled: BigInt = man << shift as u64;
    let root = scaled.sqrt();
    let e = (x.exponent() - shift) / 2;
    let exact = &root * &root == scaled;
    let ulp = if exact {
        Dyadic::zero()
    } else {
        Dyadic::pow2(e)
    };
    (Dyadic::new(root, e), ulp)
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ± {}",
            self.midpoint_decimal(20),
            self.printed_radius(20)
        )
    }
}
