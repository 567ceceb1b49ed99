use num_bigint::BigInt;
use pellsum::pell;
use pellsum::search::{
    brute_force, case_ell_zero, is_power_of_two, verify_solution, SolutionTuple, ALL_SOLUTIONS,
    LISTED_SOLUTIONS, UNLISTED_SOLUTION,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_is_monotone(a in 0u64..=60, b in 0u64..=60) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = brute_force(lo);
        let large = brute_force(hi);
        prop_assert!(small.iter().all(|t| large.contains(t)));
        prop_assert!(large.iter().all(verify_solution));
        prop_assert!(large.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn random_tuples_match_direct_arithmetic(n in 0u64..=40, m in 0u64..=40, l in 0u64..=40, a in 0u64..=60) {
        let t = SolutionTuple::new(n, m, l, a);
        let direct = n >= m && m >= l
            && pell::pell(n) + pell::pell(m) + pell::pell(l) == BigInt::from(1) << a;
        prop_assert_eq!(verify_solution(&t), direct);
    }
}

#[test]
fn listed_and_found_solutions_verify() {
    assert!(LISTED_SOLUTIONS.iter().all(verify_solution));
    let found = brute_force(150);
    assert!(found.iter().all(verify_solution));
    assert_eq!(found, ALL_SOLUTIONS);
    assert!(verify_solution(&UNLISTED_SOLUTION));
    assert_eq!(
        pell::pell(4) + pell::pell(2) + pell::pell(2),
        BigInt::from(16)
    );
}

#[test]
fn ell_zero_case_matches_search() {
    let case = case_ell_zero().unwrap();
    let subset: Vec<_> = brute_force(150)
        .into_iter()
        .filter(|t| t.ell == 0)
        .collect();
    assert_eq!(case.solutions, subset);
}

#[test]
fn three_times_pell_is_never_a_power_of_two() {
    for n in 1..=150 {
        assert_eq!(is_power_of_two(&(pell::pell(n) * 3)), Ok(None), "n = {n}");
    }
}

#[test]
fn documented_membership() {
    assert!(verify_solution(&SolutionTuple::new(6, 5, 5, 7)));
    assert!(verify_solution(&SolutionTuple::new(5, 2, 1, 5)));
    assert!(!verify_solution(&SolutionTuple::new(4, 3, 2, 4)));
}
