mod common;

use approx::assert_abs_diff_eq;
use common::{matrices, mu_direct, pair_strategy};
use proptest::prelude::*;
use zerorate_core::mu::{kl_divergence, sup_sigma};
use zerorate_core::{ExtendedReal, LimitClass, PairKernel};

fn finite(v: ExtendedReal) -> f64 {
    v.finite().expect("finite value")
}

/// `-ln` of the n-letter sum, enumerating every output sequence.
fn mu_sequence_direct(w: &[Vec<f64>], q: &[Vec<f64>], x1: &[usize], x2: &[usize], s: f64) -> f64 {
    let ny = w[0].len();
    let n = x1.len();
    let mut total = 0.0;
    for code in 0..ny.pow(n as u32) {
        let mut c = code;
        let mut term = 1.0;
        for i in 0..n {
            let y = c % ny;
            c /= ny;
            let (a, b) = (x1[i], x2[i]);
            if w[a][y] > 0.0 && q[a][y] > 0.0 && q[b][y] > 0.0 {
                term *= w[a][y] * (q[b][y] / q[a][y]).powf(s);
            } else {
                term = 0.0;
            }
        }
        total += term;
    }
    -total.ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn kernel_matches_direct_sum(pair in pair_strategy(4, 4, false), s in 0.01f64..6.0) {
        let (w, q) = matrices(&pair);
        let k = PairKernel::new(&pair);
        for a in 0..pair.num_inputs() {
            for b in 0..pair.num_inputs() {
                let direct = mu_direct(&w, &q, a, b, s);
                match k.mu(a, b, s).unwrap() {
                    ExtendedReal::Finite(v) => prop_assert!((v - direct).abs() <= 1e-10 * (1.0 + direct.abs())),
                    other => prop_assert!(direct.is_infinite() && other.is_pos_infinite()),
                }
            }
        }
    }

    #[test]
    fn diagonal_is_identically_zero(pair in pair_strategy(4, 4, false), s in 0.0f64..100.0) {
        let k = PairKernel::new(&pair);
        for a in 0..pair.num_inputs() {
            prop_assert_eq!(k.mu(a, a, s).unwrap(), ExtendedReal::ZERO);
        }
    }

    #[test]
    fn concave_along_chords(pair in pair_strategy(4, 4, true), s0 in 0.01f64..8.0, s1 in 0.01f64..8.0, t in 0.0f64..1.0) {
        let k = PairKernel::new(&pair);
        let mid = t * s0 + (1.0 - t) * s1;
        for a in 0..pair.num_inputs() {
            for b in 0..pair.num_inputs() {
                let chord = t * finite(k.mu(a, b, s0).unwrap()) + (1.0 - t) * finite(k.mu(a, b, s1).unwrap());
                prop_assert!(finite(k.mu(a, b, mid).unwrap()) >= chord - 1e-9);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences(pair in pair_strategy(4, 4, true), s in 0.05f64..5.0) {
        let k = PairKernel::new(&pair);
        let h = 1e-5;
        for a in 0..pair.num_inputs() {
            for b in 0..pair.num_inputs() {
                let f = |s| finite(k.mu(a, b, s).unwrap());
                let fd = (f(s + h) - f(s - h)) / (2.0 * h);
                let d = finite(k.mu_prime(a, b, s).unwrap());
                prop_assert!((fd - d).abs() <= 1e-6, "mu' {d} vs {fd}");
                let g = |s| finite(k.mu_prime(a, b, s).unwrap());
                let fd2 = (g(s + h) - g(s - h)) / (2.0 * h);
                prop_assert!((fd2 - k.mu_second(a, b, s).unwrap()).abs() <= 1e-5);
                prop_assert!(k.mu_second(a, b, s).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn sequence_value_is_additive_and_matches_enumeration(
        pair in pair_strategy(3, 3, false),
        letters in prop::collection::vec((0usize..3, 0usize..3), 1..4),
        s in 0.05f64..4.0,
    ) {
        let nx = pair.num_inputs();
        let x1: Vec<usize> = letters.iter().map(|&(a, _)| a % nx).collect();
        let x2: Vec<usize> = letters.iter().map(|&(_, b)| b % nx).collect();
        let k = PairKernel::new(&pair);
        let total = k.mu_sequence(&x1, &x2, s).unwrap();
        let (w, q) = matrices(&pair);
        let direct = mu_sequence_direct(&w, &q, &x1, &x2, s);
        match total {
            ExtendedReal::Finite(v) => {
                let sum: f64 = x1.iter().zip(&x2).map(|(&a, &b)| finite(k.mu(a, b, s).unwrap())).sum();
                prop_assert!((v - sum).abs() <= 1e-12 * (1.0 + sum.abs()));
                prop_assert!((v - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
            }
            other => prop_assert!(other.is_pos_infinite() && direct.is_infinite()),
        }
    }

    #[test]
    fn tilt_identity(pair in pair_strategy(4, 4, false), s in 0.0f64..6.0) {
        let k = PairKernel::new(&pair);
        let (w, _) = matrices(&pair);
        for a in 0..pair.num_inputs() {
            for b in 0..pair.num_inputs() {
                if k.empty_support(a, b) {
                    continue;
                }
                let v = k.tilted_distribution(a, b, s).unwrap();
                prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let lhs = finite(k.mu(a, b, s).unwrap()) - s * finite(k.mu_prime(a, b, s).unwrap());
                prop_assert!((lhs - kl_divergence(&v, &w[a])).abs() <= 1e-9, "{lhs}");
            }
        }
    }

    #[test]
    fn limit_class_agrees_with_slope(pair in pair_strategy(4, 4, false)) {
        let k = PairKernel::new(&pair);
        for a in 0..pair.num_inputs() {
            for b in 0..pair.num_inputs() {
                if k.empty_support(a, b) {
                    prop_assert_eq!(k.classify_limit(a, b), LimitClass::DivergesToPlusInfinity);
                    continue;
                }
                let limit = k.mu_prime_limit(a, b).finite().unwrap();
                let at_50 = finite(k.mu_prime(a, b, 50.0).unwrap());
                // mu' decreases towards its limit.
                prop_assert!(at_50 >= limit - 1e-9);
                match k.classify_limit(a, b) {
                    LimitClass::DivergesToPlusInfinity => prop_assert!(limit > 0.0),
                    LimitClass::DivergesToMinusInfinity => prop_assert!(limit < 0.0),
                    LimitClass::FiniteLimit => {
                        prop_assert_eq!(limit, 0.0);
                        let l = k.finite_limit(a, b).unwrap();
                        prop_assert!(finite(k.mu(a, b, 50.0).unwrap()) <= l + 1e-12);
                        prop_assert!((finite(k.mu(a, b, 200.0).unwrap()) - l).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_supremum_dominates_samples(pair in pair_strategy(3, 4, true), s in 0.0f64..20.0) {
        let k = PairKernel::new(&pair);
        for a in 0..pair.num_inputs() {
            for b in 0..pair.num_inputs() {
                let sup = sup_sigma(&k, a, b).unwrap();
                let at = finite(k.mu(a, b, s).unwrap()) + finite(k.mu(b, a, s).unwrap());
                prop_assert!(sup.value >= ExtendedReal::Finite(at - 1e-9));
            }
        }
    }
}

#[test]
fn bsc_supremum_is_the_bhattacharyya_distance() {
    let pair = zerorate_core::fixtures::bsc(zerorate_core::rational::ratio(1, 4));
    let k = PairKernel::new(&pair);
    let sup = zerorate_core::mu::sup_mixture(&k, &[(0, 1, 1)]).unwrap();
    // -ln(2 sqrt(p (1 - p))) at p = 1/4
    let bhattacharyya = -(2.0 * (0.25f64 * 0.75).sqrt()).ln();
    assert_abs_diff_eq!(sup.value.finite().unwrap(), bhattacharyya, epsilon = 1e-10);
    assert_abs_diff_eq!(sup.argsup.finite().unwrap(), 0.5, epsilon = 1e-8);
}
