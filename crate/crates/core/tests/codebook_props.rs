mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use zerorate_core::codebook::{joint_type, komlos_bound, komlos_extract, plotkin_identity, Codebook};
use zerorate_core::rational::Rational;

fn code_strategy(max_x: usize, max_m: usize, max_n: usize) -> impl Strategy<Value = Codebook> {
    (2..=max_x, 2..=max_m, 1..=max_n).prop_flat_map(|(k, m, n)| {
        prop::collection::vec(prop::collection::vec(0..k, n), m).prop_map(move |w| Codebook::new(k, w).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn double_counting_is_exact(code in code_strategy(4, 10, 20)) {
        let n = code.blocklength();
        for a in 0..code.num_inputs() {
            for b in 0..code.num_inputs() {
                if a == b {
                    continue;
                }
                let (lhs, rhs) = plotkin_identity(&code, a, b).unwrap();
                prop_assert_eq!(&lhs, &rhs);
                // Independent count: ordered codeword pairs agreeing with (a, b) per coordinate.
                let mut hits = 0u64;
                for c in 0..n {
                    for (i, u) in code.words().iter().enumerate() {
                        for (j, v) in code.words().iter().enumerate() {
                            if i != j && u[c] == a && v[c] == b {
                                hits += 1;
                            }
                        }
                    }
                }
                prop_assert_eq!(lhs, Rational::new(BigInt::from(hits), BigInt::from(n)));
            }
        }
    }

    #[test]
    fn joint_type_transposes(code in code_strategy(3, 2, 12)) {
        let k = code.num_inputs();
        let p = joint_type(k, code.word(0), code.word(1)).unwrap();
        let q = joint_type(k, code.word(1), code.word(0)).unwrap();
        prop_assert_eq!(p.transpose(), q.clone());
        let total: u64 = q.cells().iter().map(|c| c.2).sum();
        prop_assert_eq!(total, code.blocklength() as u64);
    }

    #[test]
    fn extracted_subcodes_are_monochromatic(code in code_strategy(2, 16, 10), t in 1u64..5) {
        let cert = komlos_extract(&code, t, code.len()).unwrap();
        prop_assert_eq!(cert.indices.len(), cert.m_hat);
        prop_assert!(cert.m_hat >= 2);
        let colour = |i: usize, j: usize| {
            joint_type(2, code.word(i), code.word(j)).unwrap().quantize(t)
        };
        let first = colour(cert.indices[0], cert.indices[1]);
        for (x, &i) in cert.indices.iter().enumerate() {
            for &j in &cert.indices[x + 1..] {
                prop_assert_eq!(colour(i, j), first.clone());
            }
        }
        prop_assert!(cert.asymmetry <= komlos_bound(cert.m_hat, cert.spread) + 1e-12);
    }
}

mod distances {
    use super::*;
    use zerorate_core::codebook::{dmin_certificate, pair_distance};
    use zerorate_core::exponent::ExponentOptions;
    use zerorate_core::fixtures;
    use zerorate_core::rational::ratio;
    use zerorate_core::PairKernel;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn distance_is_symmetric_and_repetition_invariant(
            pair in super::common::pair_strategy(3, 3, true),
            raw in prop::collection::vec((0usize..3, 0usize..3), 1..6),
            k in 2usize..4,
        ) {
            let n = pair.num_inputs();
            let x1: Vec<usize> = raw.iter().map(|p| p.0 % n).collect();
            let x2: Vec<usize> = raw.iter().map(|p| p.1 % n).collect();
            let kernel = PairKernel::new(&pair);
            let d12 = pair_distance(&kernel, &x1, &x2).unwrap().value;
            let d21 = pair_distance(&kernel, &x2, &x1).unwrap().value;
            prop_assert_eq!(d12, d21);
            let rep = |x: &[usize]| x.repeat(k);
            let dk = pair_distance(&kernel, &rep(&x1), &rep(&x2)).unwrap().value;
            let (a, b) = (d12.finite().unwrap(), dk.finite().unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        }

        #[test]
        fn chain_holds_on_random_bsc_codes(words in prop::collection::vec(prop::collection::vec(0usize..2, 12), 16)) {
            let pair = fixtures::bsc(ratio(1, 4));
            let code = Codebook::new(2, words).unwrap();
            let kernel = PairKernel::new(&pair);
            let cert = komlos_extract(&code, 4, 4).unwrap();
            let chain = dmin_certificate(&kernel, &code, &cert.indices, 4, &ExponentOptions::default()).unwrap();
            prop_assert!(chain.holds, "{:?}", chain);
            prop_assert!(chain.slacks.iter().all(|&s| s >= -1e-9));
            prop_assert!(chain.s_bar_max <= chain.s_cap + 1e-9);
            prop_assert!(chain.closeness <= chain.closeness_bound + 1e-9);
        }
    }

    #[test]
    fn spec_distance_examples() {
        let pair = fixtures::bsc(ratio(1, 4));
        let kernel = PairKernel::new(&pair);
        let d = |x: &[usize], y: &[usize]| pair_distance(&kernel, x, y).unwrap().value.finite().unwrap();
        let b = -(2.0 * (0.1875f64).sqrt()).ln();
        assert!((d(&[0], &[1]) - b).abs() < 1e-10);
        assert!((d(&[0, 0], &[0, 1]) - b / 2.0).abs() < 1e-10);
        assert_eq!(d(&[0, 1], &[0, 1]), 0.0);
    }
}
