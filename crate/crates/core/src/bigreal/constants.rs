//! Named constants and the logarithm kernel.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{sqrt_floor, CertifiedReal, Dyadic, RealError};

/// Guard bits used inside series evaluation.
const GUARD_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Two,
    Sqrt2,
    /// `1 + sqrt(2)`
    Alpha,
    /// `1 - sqrt(2)`
    Beta,
    Log2,
    LogAlpha,
    LogSqrt2,
}

impl Constant {
    pub const ALL: [Constant; 7] = [
        Constant::Two,
        Constant::Sqrt2,
        Constant::Alpha,
        Constant::Beta,
        Constant::Log2,
        Constant::LogAlpha,
        Constant::LogSqrt2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Two => "two",
            Constant::Sqrt2 => "sqrt2",
            Constant::Alpha => "alpha",
            Constant::Beta => "beta",
            Constant::Log2 => "log2",
            Constant::LogAlpha => "log_alpha",
            Constant::LogSqrt2 => "log_sqrt2",
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constant {
    type Err = RealError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Constant::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| RealError::UnknownConstant(s.to_string()))
    }
}

type Cache = RwLock<HashMap<(Constant, u32), CertifiedReal>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl CertifiedReal {
    /// A named constant with radius at most `2^(4 - bits)`. Memoized per
    /// `(name, bits)`.
    pub fn constant(c: Constant, bits: u32) -> Result<CertifiedReal, RealError> {
        if bits < 16 {
            return Err(RealError::PrecisionTooLow(bits));
        }
        if let Some(v) = cache()
            .read()
            .expect("constant cache poisoned")
            .get(&(c, bits))
        {
            return Ok(v.clone());
        }
        let v = compute(c, bits)?;
        cache()
            .write()
            .expect("constant cache poisoned")
            .entry((c, bits))
            .or_insert_with(|| v.clone());
        Ok(v)
    }
}

fn compute(c: Constant, bits: u32) -> Result<CertifiedReal, RealError> {
    let inner = bits + 16;
    let v =
        match c {
            Constant::Two => CertifiedReal::from_int(2, inner),
            Constant::Sqrt2 => {
                let (root, ulp) = sqrt_floor(&Dyadic::from_int(2), inner);
                CertifiedReal::finish(root, ulp, inner)
            }
            Constant::Alpha => CertifiedReal::from_int(1, inner)
                .add(&CertifiedReal::constant(Constant::Sqrt2, inner)?),
            Constant::Beta => CertifiedReal::from_int(1, inner)
                .sub(&CertifiedReal::constant(Constant::Sqrt2, inner)?),
            Constant::Log2 => ln2_series(inner),
            Constant::LogAlpha => CertifiedReal::constant(Constant::Alpha, inner)?.ln()?,
            Constant::LogSqrt2 => {
                let l = CertifiedReal::constant(Constant::Log2, inner)?;
                CertifiedReal::finish(l.mid.shl(-1), l.rad.shl(-1), inner)
            }
        };
    Ok(v.with_bits(bits))
}

/// `log 2 = 2 atanh(1/3)` summed in fixed point.
fn ln2_series(bits: u32) -> CertifiedReal {
    let w = bits + GUARD_BITS;
    let nine = BigInt::from(9);
    let mut p: BigInt = (BigInt::one() << w as u64) / 3u32;
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !p.is_zero() {
        sum += &p / (2 * j + 1);
        p /= &nine;
        j += 1;
    }
    let err_ulps = BigInt::from(6 * j + 16);
    CertifiedReal::finish(
        Dyadic::new(sum << 1u32, -(w as i64)),
        Dyadic::new(err_ulps, -(w as i64)),
        bits,
    )
}

/// `log m` for an exact positive dyadic `m`.
pub(super) fn ln_point(m: &Dyadic, bits: u32) -> Result<CertifiedReal, RealError> {
    debug_assert!(m.is_positive());
    let w = bits + GUARD_BITS;
    let man = m.mantissa();
    let mut len = man.bits() as i64;
    // y = man / 2^len in [1/2, 1); move it to [1/sqrt2, sqrt2)
    let two_len = BigInt::one() << (2 * len) as u64;
    if (man * man) << 1u32 < two_len {
        len -= 1;
    }
    let k = len + m.exponent();
    let unit = BigInt::one() << len as u64;
    let diff = man - &unit;
    let ln_y = if diff.is_zero() {
        CertifiedReal::from_int(0, bits)
    } else {
        let negative = diff.is_negative();
        // z = (y - 1) / (y + 1), |z| < 0.172
        let z: BigInt = (diff.abs() << w as u64) / (man + &unit);
        let z2: BigInt = (&z * &z) >> w as u64;
        let mut p = z;
        let mut sum = BigInt::zero();
        let mut j: u64 = 0;
        while !p.is_zero() {
            sum += &p / (2 * j + 1);
            p = (&p * &z2) >> w as u64;
            j += 1;
        }
        let sum = if negative { -sum } else { sum };
        CertifiedReal::finish(
            Dyadic::new(sum << 1u32, -(w as i64)),
            Dyadic::new(BigInt::from(8 * j + 16), -(w as i64)),
            w,
        )
    };
    if k == 0 {
        return Ok(ln_y.with_bits(bits));
    }
    let ln2 = CertifiedReal::constant(Constant::Log2, w)?;
    Ok(ln2.mul_int(&BigInt::from(k)).add(&ln_y).with_bits(bits))
}
