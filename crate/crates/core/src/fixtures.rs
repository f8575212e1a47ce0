//! Channel/metric pairs used throughout the examples and tests.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::channel::ChannelMetricPair;
use crate::rational::{ratio, Rational};

fn matched(w: Vec<Vec<Rational>>) -> ChannelMetricPair {
    ChannelMetricPair::from_matrices(w.clone(), w).expect("fixture is valid")
}

/// Binary symmetric channel with crossover `p` and the matched metric.
pub fn bsc(p: Rational) -> ChannelMetricPair {
    let c = Rational::one() - &p;
    matched(vec![vec![c.clone(), p.clone()], vec![p, c]]).with_name("bsc")
}

/// Ternary symmetric channel: correct with `1 - p`, each error with `p/2`.
pub fn ternary_symmetric(p: Rational) -> ChannelMetricPair {
    let c = Rational::one() - &p;
    let e = &p / ratio(2, 1);
    matched(vec![
        vec![c.clone(), e.clone(), e.clone()],
        vec![e.clone(), c.clone(), e.clone()],
        vec![e.clone(), e, c],
    ])
    .with_name("ternary-symmetric")
}

/// Noiseless identity channel on `k` symbols with the matched metric.
pub fn noiseless(k: usize) -> ChannelMetricPair {
    let w = (0..k)
        .map(|x| {
            (0..k)
                .map(|y| if x == y { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    matched(w).with_name("noiseless")
}

/// Three-input typewriter channel with crossover `eps` and the metric that
/// equals `W` except `q(1, 0) = q(1, 2) = eps / 2`; a pair with zero
/// equiprobable zero-error capacity that is not balanced.
pub fn typewriter(eps: Rational) -> ChannelMetricPair {
    let z = Rational::zero;
    let c = Rational::one() - &eps;
    let w = vec![
        vec![c.clone(), eps.clone(), z()],
        vec![z(), c.clone(), eps.clone()],
        vec![eps.clone(), z(), c.clone()],
    ];
    let half = &eps / ratio(2, 1);
    let mut q = w.clone();
    q[1][0] = half.clone();
    q[1][2] = half;
    ChannelMetricPair::from_matrices(w, q)
        .expect("fixture is valid")
        .with_name("typewriter-example")
}

/// Constant metric `q = 1` over the given channel: every output is a tie.
pub fn constant_metric(w: Vec<Vec<Rational>>) -> ChannelMetricPair {
    let q = w.iter().map(|r| vec![Rational::one(); r.len()]).collect();
    ChannelMetricPair::from_matrices(w, q).expect("fixture is valid")
}
