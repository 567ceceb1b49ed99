//! Exhaustive search for `P_n + P_m + P_l = 2^a` and the structural
//! treatment of `l = 0`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::pell::{self, PellError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("expected a positive integer, got {0}")]
    NotPositive(BigInt),
    #[error(transparent)]
    Pell(#[from] PellError),
}

/// `(n, m, l, a)` with `n >= m >= l >= 0`; ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionTuple {
    pub n: u64,
    pub m: u64,
    pub ell: u64,
    pub a: u64,
}

impl SolutionTuple {
    pub const fn new(n: u64, m: u64, ell: u64, a: u64) -> Self {
        SolutionTuple { n, m, ell, a }
    }
}

impl fmt::Display for SolutionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.n, self.m, self.ell, self.a)
    }
}

/// The eight solutions in the commonly quoted list, sorted.
pub const LISTED_SOLUTIONS: [SolutionTuple; 8] = [
    SolutionTuple::new(1, 0, 0, 0),
    SolutionTuple::new(1, 1, 0, 1),
    SolutionTuple::new(2, 0, 0, 1),
    SolutionTuple::new(2, 1, 1, 2),
    SolutionTuple::new(2, 2, 0, 2),
    SolutionTuple::new(3, 2, 1, 3),
    SolutionTuple::new(5, 2, 1, 5),
    SolutionTuple::new(6, 5, 5, 7),
];

/// Missing from [`LISTED_SOLUTIONS`]: `P_4 + P_2 + P_2 = 12 + 2 + 2 = 2^4`.
pub const UNLISTED_SOLUTION: SolutionTuple = SolutionTuple::new(4, 2, 2, 4);

/// The complete solution set, sorted.
pub const ALL_SOLUTIONS: [SolutionTuple; 9] = [
    SolutionTuple::new(1, 0, 0, 0),
    SolutionTuple::new(1, 1, 0, 1),
    SolutionTuple::new(2, 0, 0, 1),
    SolutionTuple::new(2, 1, 1, 2),
    SolutionTuple::new(2, 2, 0, 2),
    SolutionTuple::new(3, 2, 1, 3),
    UNLISTED_SOLUTION,
    SolutionTuple::new(5, 2, 1, 5),
    SolutionTuple::new(6, 5, 5, 7),
];

/// `Some(a)` iff `x = 2^a`.
pub fn is_power_of_two(x: &BigInt) -> Result<Option<u64>, SearchError> {
    if !x.is_positive() {
        return Err(SearchError::NotPositive(x.clone()));
    }
    let a = x.trailing_zeros().unwrap_or(0);
    Ok((x >> a).is_one().then_some(a))
}

/// All solutions with `n <= n_max`, sorted.
pub fn brute_force(n_max: u64) -> Vec<SolutionTuple> {
    let p = pell::pell_prefix(n_max);
    let top = &p[n_max as usize] * 3u32;
    let powers: HashMap<BigInt, u64> = (0..=top.bits() + 1)
        .map(|a| (BigInt::one() << a, a))
        .collect();
    let mut out: Vec<SolutionTuple> = (0..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut local = Vec::new();
            let pn = &p[n as usize];
            for m in 0..=n {
                let pnm = pn + &p[m as usize];
                for ell in 0..=m {
                    let s = &pnm + &p[ell as usize];
                    if let Some(&a) = powers.get(&s) {
                        local.push(SolutionTuple::new(n, m, ell, a));
                    }
                }
            }
            local
        })
        .collect();
    out.sort_unstable();
    out
}

/// Exact check of the equation and the ordering.
pub fn verify_solution(t: &SolutionTuple) -> bool {
    if !(t.n >= t.m && t.m >= t.ell) {
        return false;
    }
    let s = pell::pell(t.n) + pell::pell(t.m) + pell::pell(t.ell);
    s == BigInt::one() << t.a
}

/// Solutions with `l = 0` and the reasoning that makes the list complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllZeroCase {
    pub solutions: Vec<SolutionTuple>,
    pub notes: Vec<String>,
}

/// Largest index whose `P_n` can be a power of two: beyond it `P_n` has an
/// odd prime factor `>= n - 1` (primitive divisors).
pub const POWER_OF_TWO_INDEX_CAP: u64 = 12;

/// Replays the `l = 0` argument.
///
/// With `m = 0` the equation is `P_n = 2^a`, so `n <= 12`. With `m > 0` the
/// sum `P_n + P_m` is at least 2 and even, so `n` and `m` share parity and
/// `P_n + P_m = P_s Q_d` with `s = (n + δm)/2`, `d = (n - δm)/2`. Since
/// `Q_d / 2` is odd, `Q_d` is a power of two only for `d <= 1`; then `P_s`
/// must be one too, so `s <= 12`. The candidates left are checked exactly.
pub fn case_ell_zero() -> Result<EllZeroCase, SearchError> {
    let cap = POWER_OF_TWO_INDEX_CAP;
    let mut notes = Vec::new();
    let mut solutions = Vec::new();

    let probe_hi = cap + 12;
    for n in cap + 1..=probe_hi {
        if !pell::has_prime_factor_at_least(n)? {
            return Err(SearchError::Pell(PellError::IndexOutOfRange {
                n,
                min: cap + 1,
                max: probe_hi,
            }));
        }
    }
    notes.push(format!(
        "P_n has a prime factor >= n - 1 >= 12 for n >= 13 (checked by factorization for 13..={probe_hi}), so P_n = 2^a forces n <= {cap}"
    ));

    for n in 0..=cap {
        if let Some(a) = power_of_two_or_none(&pell::pell(n)) {
            solutions.push(SolutionTuple::new(n, 0, 0, a));
        }
    }
    notes.push("m = l = 0: P_n = 2^a only for n = 1 (a = 0) and n = 2 (a = 1)".to_string());

    notes.push(
        "m > 0: P_n + P_m >= 2 is even and P_k is odd iff k is odd, so n and m have the same parity"
            .to_string(),
    );
    let nu_check_hi = 200;
    let q_halves_odd = (0..=nu_check_hi).all(|d| pell::nu2(&pell::pell_lucas(d)) == Ok(1));
    if !q_halves_odd {
        return Err(SearchError::Pell(PellError::IdentityFailed { n: 0, m: 0 }));
    }
    notes.push(format!(
        "nu2(Q_d) = 1 (checked for d <= {nu_check_hi}), so Q_d = 2^b forces Q_d = 2, i.e. d = (n - δm)/2 in {{0, 1}}"
    ));
    notes.push(format!(
        "then P_s = 2^(a-1) with s = (n + δm)/2, so s <= {cap} and n = s + d <= {}",
        cap + 1
    ));

    let mut skipped_parity = 0u32;
    for n in 1..=cap + 1 {
        for m in 1..=n {
            if (n - m) % 2 == 1 {
                skipped_parity += 1;
                continue;
            }
            let f = pell::two_sum_factorization(n, m)?;
            if f.half_diff_index > 1 || f.half_sum_index > cap {
                continue;
            }
            let s = pell::pell(n) + pell::pell(m);
            if let Some(a) = power_of_two_or_none(&s) {
                solutions.push(SolutionTuple::new(n, m, 0, a));
            }
        }
    }
    notes.push(format!(
        "skipped {skipped_parity} mixed-parity pairs with n <= {}; remaining candidates with d <= 1, s <= {cap} checked exactly",
        cap + 1
    ));
    solutions.sort_unstable();
    Ok(EllZeroCase { solutions, notes })
}

fn power_of_two_or_none(x: &BigInt) -> Option<u64> {
    if x.is_zero() {
        None
    } else {
        is_power_of_two(x).ok().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two() {
        assert_eq!(is_power_of_two(&32.into()), Ok(Some(5)));
        assert_eq!(is_power_of_two(&1.into()), Ok(Some(0)));
        assert_eq!(is_power_of_two(&12.into()), Ok(None));
        assert!(is_power_of_two(&0.into()).is_err());
    }

    #[test]
    fn small_searches() {
        assert!(brute_force(0).is_empty());
        let three = brute_force(3);
        let expected = [
            SolutionTuple::new(1, 0, 0, 0),
            SolutionTuple::new(1, 1, 0, 1),
            SolutionTuple::new(2, 0, 0, 1),
            SolutionTuple::new(2, 1, 1, 2),
            SolutionTuple::new(2, 2, 0, 2),
            SolutionTuple::new(3, 2, 1, 3),
        ];
        assert_eq!(three, expected);
    }

    #[test]
    fn full_range_finds_one_unlisted_solution() {
        let found = brute_force(150);
        assert_eq!(found, ALL_SOLUTIONS);
        let extra: Vec<_> = found
            .iter()
            .filter(|t| !LISTED_SOLUTIONS.contains(t))
            .collect();
        assert_eq!(extra, [&UNLISTED_SOLUTION]);
    }

    #[test]
    fn solution_checks() {
        assert!(verify_solution(&SolutionTuple::new(6, 5, 5, 7)));
        assert!(verify_solution(&SolutionTuple::new(5, 2, 1, 5)));
        assert!(!verify_solution(&SolutionTuple::new(4, 3, 2, 4)));
        assert!(!verify_solution(&SolutionTuple::new(1, 2, 0, 2)));
        assert!(ALL_SOLUTIONS.iter().all(verify_solution));
        assert!(verify_solution(&UNLISTED_SOLUTION));
    }

    #[test]
    fn ell_zero_matches_search() {
        let case = case_ell_zero().unwrap();
        let from_search: Vec<_> = brute_force(150)
            .into_iter()
            .filter(|t| t.ell == 0)
            .collect();
        assert_eq!(case.solutions, from_search);
        assert!(case.notes.iter().any(|n| n.contains("mixed-parity")));
    }
}
