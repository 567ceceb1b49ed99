//! Exact Pell numbers `P_n`, their companion sequence `Q_n`, and the
//! divisibility facts the classification relies on.
//!
//! `P_0 = 0, P_1 = 1, P_{n+1} = 2 P_n + P_{n-1}` and
//! `Q_0 = Q_1 = 2, Q_{n+2} = 2 Q_{n+1} + Q_n`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest index accepted by [`has_prime_factor_at_least`].
pub const FACTOR_CAP: u64 = 200;
/// Trial division runs over all candidates below this bound.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PellError {
    #[error("2-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("valuation requires a positive integer, got {0}")]
    NegativeValuation(BigInt),
    #[error("indices must satisfy n >= m >= 0, got n={n}, m={m}")]
    Ordering { n: u64, m: u64 },
    #[error("n={n} and m={m} have different parity; the two-sum factorization does not apply")]
    ParityMismatch { n: u64, m: u64 },
    #[error("index {n} outside the supported range {min}..={max}")]
    IndexOutOfRange { n: u64, min: u64, max: u64 },
    #[error("factorization identity failed for n={n}, m={m}")]
    IdentityFailed { n: u64, m: u64 },
}

struct Table {
    pell: Vec<BigInt>,
    lucas: Vec<BigInt>,
}

fn table() -> &'static RwLock<Table> {
    static TABLE: OnceLock<RwLock<Table>> = OnceLock::new();
    TABLE.get_or_init(|| {
        RwLock::new(Table {
            pell: vec![BigInt::zero(), BigInt::one()],
            lucas: vec![BigInt::from(2), BigInt::from(2)],
        })
    })
}

fn ensure(n: usize) {
    if table().read().expect("pell table poisoned").pell.len() > n {
        return;
    }
    let mut t = table().write().expect("pell table poisoned");
    while t.pell.len() <= n {
        let k = t.pell.len();
        let p = (&t.pell[k - 1] << 1u32) + &t.pell[k - 2];
        let q = (&t.lucas[k - 1] << 1u32) + &t.lucas[k - 2];
        t.pell.push(p);
        t.lucas.push(q);
    }
}

/// `P_n`.
pub fn pell(n: u64) -> BigInt {
    ensure(n as usize);
    table().read().expect("pell table poisoned").pell[n as usize].clone()
}

/// `Q_n`.
pub fn pell_lucas(n: u64) -> BigInt {
    ensure(n as usize);
    table().read().expect("pell table poisoned").lucas[n as usize].clone()
}

/// `P_0 ..= P_n` in one lock acquisition.
pub fn pell_prefix(n: u64) -> Vec<BigInt> {
    ensure(n as usize);
    table().read().expect("pell table poisoned").pell[..=n as usize].to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellPair {
    pub index: u64,
    pub p_value: BigInt,
    pub q_value: BigInt,
}

impl PellPair {
    pub fn new(index: u64) -> Self {
        PellPair {
            index,
            p_value: pell(index),
            q_value: pell_lucas(index),
        }
    }
}

/// 2-adic valuation of a positive integer.
pub fn nu2(x: &BigInt) -> Result<u64, PellError> {
    if x.is_zero() {
        return Err(PellError::ZeroValuation);
    }
    if x.is_negative() {
        return Err(PellError::NegativeValuation(x.clone()));
    }
    Ok(x.trailing_zeros().unwrap_or(0))
}

/// `P_n + P_m = P_{(n + δm)/2} · Q_{(n − δm)/2}` with `δ = +1` iff `n ≡ m (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoSumFactorization {
    pub half_sum_index: u64,
    pub half_diff_index: u64,
    pub delta: i8,
}

pub fn two_sum_factorization(n: u64, m: u64) -> Result<TwoSumFactorization, PellError> {
    if n < m {
        return Err(PellError::Ordering { n, m });
    }
    if (n - m) % 2 != 0 {
        return Err(PellError::ParityMismatch { n, m });
    }
    let delta: i8 = if (n - m) % 4 == 0 { 1 } else { -1 };
    let (half_sum_index, half_diff_index) = if delta == 1 {
        ((n + m) / 2, (n - m) / 2)
    } else {
        ((n - m) / 2, (n + m) / 2)
    };
    if pell(half_sum_index) * pell_lucas(half_diff_index) != pell(n) + pell(m) {
        return Err(PellError::IdentityFailed { n, m });
    }
    Ok(TwoSumFactorization {
        half_sum_index,
        half_diff_index,
        delta,
    })
}

/// Prime factorization of `P_n` by trial division.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Primes found by trial division with multiplicity.
    pub small: Vec<(u64, u32)>,
    /// Cofactor left after trial division, if larger than one. All of its
    /// prime factors exceed [`TRIAL_DIVISION_LIMIT`].
    pub cofactor: Option<BigInt>,
    /// Whether the cofactor passed the Miller–Rabin rounds.
    pub cofactor_probable_prime: bool,
}

impl Factorization {
    pub fn largest_small_prime(&self) -> Option<u64> {
        self.small.last().map(|&(p, _)| p)
    }
}

pub fn factor(value: &BigInt) -> Factorization {
    let mut rest = value.abs();
    let mut small = Vec::new();
    if rest.is_zero() {
        return Factorization {
            small,
            cofactor: None,
            cofactor_probable_prime: false,
        };
    }
    let mut d: u64 = 2;
    while d < TRIAL_DIVISION_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bd);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            small.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut cofactor = None;
    let mut prime = false;
    if rest > BigInt::one() {
        match rest.to_u64() {
            // no factor below sqrt(rest): rest is prime
            Some(r) if r < TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT => {
                small.push((r, 1));
                small.sort_unstable();
            }
            _ => {
                prime = is_probable_prime(&rest);
                cofactor = Some(rest);
            }
        }
    }
    Factorization {
        small,
        cofactor,
        cofactor_probable_prime: prime,
    }
}

/// Miller–Rabin over the first twenty prime bases.
pub fn is_probable_prime(n: &BigInt) -> bool {
    const BASES: [u32; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for &b in &BASES {
        let b = BigInt::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'outer: for &b in &BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Whether `P_n` has a prime factor `>= n - 1`, decided from the trial
/// division of `P_n`. A leftover cofactor only has prime factors above
/// [`TRIAL_DIVISION_LIMIT`], which exceeds `n - 1` throughout the range.
pub fn has_prime_factor_at_least(n: u64) -> Result<bool, PellError> {
    if !(13..=FACTOR_CAP).contains(&n) {
        return Err(PellError::IndexOutOfRange {
            n,
            min: 13,
            max: FACTOR_CAP,
        });
    }
    let f = factor(&pell(n));
    if f.cofactor.is_some() {
        return Ok(true);
    }
    Ok(f.largest_small_prime().is_some_and(|p| p + 1 >= n))
}

/// An element `a + b·sqrt(2)` of `Z[sqrt 2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSqrt2 {
    pub a: BigInt,
    pub b: BigInt,
}

impl ZSqrt2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        ZSqrt2 {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn one() -> Self {
        ZSqrt2::new(1, 0)
    }

    pub fn sqrt2() -> Self {
        ZSqrt2::new(0, 1)
    }

    /// `alpha^k = Q_k/2 + P_k sqrt2` and `alpha^-k = (-1)^k (Q_k/2 - P_k sqrt2)`.
    pub fn alpha_pow(k: i64) -> Self {
        let m = k.unsigned_abs();
        let half_q: BigInt = pell_lucas(m) >> 1u32;
        let p = pell(m);
        if k >= 0 {
            ZSqrt2 { a: half_q, b: p }
        } else if m % 2 == 0 {
            ZSqrt2 { a: half_q, b: -p }
        } else {
            ZSqrt2 { a: -half_q, b: p }
        }
    }

    pub fn add(&self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    pub fn mul(&self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 {
            a: &self.a * &o.a + ((&self.b * &o.b) << 1u32),
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn conjugate(&self) -> ZSqrt2 {
        ZSqrt2 {
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// `a^2 - 2 b^2`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - ((&self.b * &self.b) << 1u32)
    }

    /// Writes a positive element as `sqrt2^e · alpha^j` when its norm is
    /// `±2^e`, i.e. when it has no prime factor other than `sqrt 2`.
    pub fn sqrt2_alpha_decomposition(&self) -> Option<(u32, i64)> {
        let norm = self.norm();
        if norm.is_zero() {
            return None;
        }
        let e = norm.abs().trailing_zeros().unwrap_or(0);
        if (norm.abs() >> e) != BigInt::one() {
            return None;
        }
        // divide out sqrt2 e times: (a + b√2)/√2 = b + (a/2)√2
        let mut u = self.clone();
        for _ in 0..e {
            if u.a.is_odd() {
                return None;
            }
            u = ZSqrt2 {
                a: u.b.clone(),
                b: &u.a >> 1u32,
            };
        }
        let af = u.a.to_f64()?;
        let bf = u.b.to_f64()?;
        let s2 = std::f64::consts::SQRT_2;
        let la = (1.0 + s2).ln();
        let (plus, minus) = ((af + bf * s2).abs(), (af - bf * s2).abs());
        let j = if plus >= minus {
            (plus.ln() / la).round() as i64
        } else {
            -(minus.ln() / la).round() as i64
        };
        (u == ZSqrt2::alpha_pow(j)).then_some((e as u32, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_values() {
        assert_eq!(pell(0), BigInt::zero());
        assert_eq!(pell(7), BigInt::from(169));
        assert_eq!(pell(12), BigInt::from(13860));
        assert_eq!(pell_lucas(0), BigInt::from(2));
        assert_eq!(pell_lucas(1), BigInt::from(2));
        assert_eq!(pell_lucas(4), BigInt::from(34));
        let pair = PellPair::new(5);
        assert_eq!((pair.p_value, pair.q_value), (29.into(), 82.into()));
    }

    #[test]
    fn valuations() {
        assert_eq!(nu2(&12.into()), Ok(2));
        assert_eq!(nu2(&1.into()), Ok(0));
        assert_eq!(nu2(&pell(8)), Ok(3));
        assert_eq!(nu2(&0.into()), Err(PellError::ZeroValuation));
        assert!(matches!(
            nu2(&(-4).into()),
            Err(PellError::NegativeValuation(_))
        ));
    }

    #[test]
    fn factorization_examples() {
        let f = two_sum_factorization(5, 1).unwrap();
        assert_eq!((f.half_sum_index, f.half_diff_index, f.delta), (3, 2, 1));
        let f = two_sum_factorization(3, 1).unwrap();
        assert_eq!((f.half_sum_index, f.half_diff_index, f.delta), (1, 2, -1));
        let f = two_sum_factorization(4, 4).unwrap();
        assert_eq!((f.half_sum_index, f.half_diff_index, f.delta), (4, 0, 1));
        assert_eq!(
            two_sum_factorization(4, 1),
            Err(PellError::ParityMismatch { n: 4, m: 1 })
        );
        assert_eq!(
            two_sum_factorization(1, 3),
            Err(PellError::Ordering { n: 1, m: 3 })
        );
    }

    #[test]
    fn small_factorizations() {
        let f = factor(&pell(13));
        assert_eq!(f.small, vec![(33461, 1)]);
        let f = factor(&pell(14));
        assert_eq!(f.small, vec![(2, 1), (13, 2), (239, 1)]);
        assert_eq!(has_prime_factor_at_least(13), Ok(true));
        assert_eq!(has_prime_factor_at_least(14), Ok(true));
        assert_eq!(has_prime_factor_at_least(20), Ok(true));
        assert!(matches!(
            has_prime_factor_at_least(12),
            Err(PellError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            has_prime_factor_at_least(201),
            Err(PellError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn p20_largest_prime() {
        // P_20 = 15994428 = 2^2 * 3 * 7 * 13 * 41 * 239... checked by multiplying back
        let f = factor(&pell(20));
        let back: BigInt = f
            .small
            .iter()
            .map(|&(p, e)| num_traits::pow(BigInt::from(p), e as usize))
            .product();
        assert_eq!(back, pell(20));
        assert!(f.largest_small_prime().unwrap() >= 19);
    }

    #[test]
    fn miller_rabin_basics() {
        assert!(is_probable_prime(&BigInt::from(1_000_000_007u64)));
        assert!(!is_probable_prime(&BigInt::from(1_000_000_007u64 * 3)));
        // 2^89 - 1 is a Mersenne prime
        let m89 = (BigInt::one() << 89u32) - 1u32;
        assert!(is_probable_prime(&m89));
        assert!(!is_probable_prime(&(&m89 * BigInt::from(1_000_003))));
    }

    #[test]
    fn z_sqrt2_units() {
        assert_eq!(ZSqrt2::alpha_pow(1), ZSqrt2::new(1, 1));
        assert_eq!(ZSqrt2::alpha_pow(-1), ZSqrt2::new(-1, 1));
        assert_eq!(
            ZSqrt2::alpha_pow(3).mul(&ZSqrt2::alpha_pow(-3)),
            ZSqrt2::one()
        );
        // 4 - 2√2 = √2^3 · alpha^-1
        assert_eq!(
            ZSqrt2::new(4, -2).sqrt2_alpha_decomposition(),
            Some((3, -1))
        );
        assert_eq!(ZSqrt2::sqrt2().sqrt2_alpha_decomposition(), Some((1, 0)));
        assert_eq!(ZSqrt2::new(3, 0).sqrt2_alpha_decomposition(), None);
        assert_eq!(ZSqrt2::new(2, 0).sqrt2_alpha_decomposition(), Some((2, 0)));
    }
}
