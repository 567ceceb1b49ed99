//! Exact binary floating-point values `mantissa * 2^exp`.
//!
//! These are the endpoints and midpoints of [`CertifiedReal`](super::CertifiedReal).
//! Every operation here is either exact or rounds in an explicitly named
//! direction, so interval code built on top can reason about error.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};

use super::decimal::{format_fraction, Rounding};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact dyadic rational `man * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.strip();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: k,
        }
    }

    fn strip(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.man.trailing_zeros() {
            if tz > 0 {
                self.man >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> Sign {
        self.man.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Position of the leading bit: `2^(msb-1) <= |self| < 2^msb`.
    /// Meaningless for zero.
    pub fn msb(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.man * k, self.exp)
    }

    /// Multiplies by `2^k` exactly.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// Rounds toward negative infinity to at most `bits` significant bits.
    /// Returns the rounded value and `ulp`, an upper bound on the error.
    pub fn round_floor(&self, bits: u32) -> (Dyadic, Dyadic) {
        self.round_with(bits, false)
    }

    /// Rounds toward positive infinity to at most `bits` significant bits.
    pub fn round_ceil(&self, bits: u32) -> Dyadic {
        self.round_with(bits, true).0
    }

    fn round_with(&self, bits: u32, up: bool) -> (Dyadic, Dyadic) {
        let len = self.man.bits();
        if len <= bits as u64 {
            return (self.clone(), Dyadic::zero());
        }
        let s = len - bits as u64;
        let div = BigInt::one() << s;
        let (q, r) = self.man.div_mod_floor(&div);
        let q = if up && !r.is_zero() { q + 1 } else { q };
        let e = self.exp + s as i64;
        (Dyadic::new(q, e), Dyadic::pow2(e))
    }

    /// `floor(self)` as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            self.man.div_floor(&(BigInt::one() << (-self.exp) as u64))
        }
    }

    /// `ceil(self)` as an integer.
    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Nearest integer, ties rounded up.
    pub fn round_nearest(&self) -> BigInt {
        self.add(&Dyadic::pow2(-1)).floor()
    }

    /// Upper bound on `self / other` for nonnegative `self` and positive
    /// `other`, with about `bits` significant bits.
    pub fn div_up(&self, other: &Dyadic, bits: u32) -> Dyadic {
        self.div_dir(other, bits, true)
    }

    /// Lower bound on `self / other` for nonnegative `self` and positive `other`.
    pub fn div_down(&self, other: &Dyadic, bits: u32) -> Dyadic {
        self.div_dir(other, bits, false)
    }

    fn div_dir(&self, other: &Dyadic, bits: u32, up: bool) -> Dyadic {
        debug_assert!(!other.is_zero());
        if self.is_zero() {
            return Dyadic::zero();
        }
        // shift so the quotient carries at least `bits` bits
        let k = bits as i64 + other.man.bits() as i64 - self.man.bits() as i64 + 1;
        let k = k.max(0);
        let num = &self.man << k as u64;
        let (q, r) = num.div_mod_floor(&other.man);
        let q = if up && !r.is_zero() { q + 1 } else { q };
        Dyadic::new(q, self.exp - other.exp - k)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            // the mantissa is odd, so this is already in lowest terms
            BigRational::new_raw(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Decimal rendering with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize, mode: Rounding) -> String {
        if self.exp >= 0 {
            format_fraction(&(&self.man << self.exp as u64), &BigInt::one(), sig, mode)
        } else {
            format_fraction(&self.man, &(BigInt::one() << (-self.exp) as u64), sig, mode)
        }
    }

    /// Floor of a rational to a dyadic with `bits` fractional precision
    /// relative to its magnitude. Returns (value, error bound).
    pub fn from_rational_floor(r: &BigRational, bits: u32) -> (Dyadic, Dyadic) {
        if r.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let num = r.numer();
        let den = r.denom();
        let k = bits as i64 + den.bits() as i64 - num.bits() as i64 + 1;
        let k = k.max(0);
        let (q, rem) = (num << k as u64).div_mod_floor(den);
        let err = if rem.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::pow2(-k)
        };
        (Dyadic::new(q, -k), err)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // keep 64 leading bits to stay inside f64 range for the mantissa
        let (r, _) = self.round_floor(64);
        let m = r.man.to_f64().unwrap_or(f64::NAN);
        let e = r.exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        m * 2f64.powi(e)
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => (a as i8).cmp(&(b as i8)),
            _ => {
                let e = self.exp.min(other.exp);
                let a = &self.man << (self.exp - e) as u64;
                let b = &other.man << (other.exp - e) as u64;
                a.cmp(&b)
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::decimal::format_sci(
            &self.to_rational(),
            20,
            super::decimal::Rounding::Nearest,
        ))
    }
}
