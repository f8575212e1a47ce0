mod common;

use approx::assert_abs_diff_eq;
use common::pair_strategy;
use proptest::prelude::*;
use zerorate_core::exponent::{expurgated_lower, gap_bound, zero_rate_exponent, ExponentKind, ExponentOptions};
use zerorate_core::fixtures;
use zerorate_core::rational::ratio;
use zerorate_core::zero_error::check_c0bar_zero;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // The relaxed value sits between the expurgated value and that value plus the gap.
    #[test]
    fn exponent_is_sandwiched(pair in pair_strategy(3, 3, false)) {
        prop_assume!(check_c0bar_zero(&pair).0);
        let opts = ExponentOptions::default();
        let r = zero_rate_exponent(&pair, &opts).unwrap();
        prop_assert!(r.lower_expurgated <= r.value + 1e-7, "{} > {}", r.lower_expurgated, r.value);
        prop_assert!(r.value <= r.lower_expurgated + r.gap_bound + 1e-7);
        prop_assert_eq!(r.kind == ExponentKind::ExactEquality, r.balanced);
        prop_assert!(r.value >= 0.0);
        prop_assert!((r.q_star.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn expurgated_value_ignores_input_order(pair in pair_strategy(3, 3, true)) {
        let opts = ExponentOptions::default();
        let n = pair.num_inputs();
        let perm: Vec<usize> = (0..n).rev().collect();
        let a = expurgated_lower(&pair, &opts).unwrap().value;
        let b = expurgated_lower(&pair.permute_inputs(&perm).unwrap(), &opts).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-7, "{a} vs {b}");
    }
}

#[test]
fn bsc_matches_closed_form() {
    // Bhattacharyya form -1/4 ln(4 p (1 - p)) for the matched binary symmetric channel.
    for (n, d) in [(1, 4), (1, 10), (1, 3)] {
        let p = n as f64 / d as f64;
        let r = zero_rate_exponent(&fixtures::bsc(ratio(n, d)), &ExponentOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, -0.25 * (4.0 * p * (1.0 - p)).ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(r.lower_expurgated, r.value, epsilon = 1e-9);
        assert_eq!(r.kind, ExponentKind::ExactEquality);
    }
}

#[test]
fn example_one_gap() {
    let pair = fixtures::typewriter(ratio(1, 10));
    assert_abs_diff_eq!(gap_bound(&pair).unwrap(), 0.5 * 10f64.ln(), epsilon = 1e-12);
    let r = zero_rate_exponent(&pair, &ExponentOptions::default()).unwrap();
    assert_eq!(r.kind, ExponentKind::UpperBound);
    assert!(r.lower_expurgated <= r.value + 1e-9);
    assert!(r.value <= r.lower_expurgated + r.gap_bound + 1e-9);
}

#[test]
fn positive_capacity_is_rejected() {
    let r = zero_rate_exponent(&fixtures::noiseless(2), &ExponentOptions::default());
    assert!(r.unwrap_err().is_precondition());
}
