#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use zerorate_core::rational::Rational;
use zerorate_core::ChannelMetricPair;

/// Exact stochastic row from nonnegative integer weights (not all zero).
pub fn normalize(weights: &[u32]) -> Vec<Rational> {
    let total: u32 = weights.iter().sum();
    weights
        .iter()
        .map(|&w| Rational::new(BigInt::from(w), BigInt::from(total)))
        .collect()
}

pub fn build(w_weights: &[Vec<u32>], q_weights: &[Vec<u32>]) -> ChannelMetricPair {
    let w = w_weights.iter().map(|r| normalize(r)).collect();
    let q = q_weights
        .iter()
        .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
        .collect();
    ChannelMetricPair::from_matrices(w, q).expect("generated pair is valid")
}

/// Integer weights for `W` and `q`. With `full_support` every entry is
/// positive; otherwise zeros appear but each row keeps some mass and the
/// metric stays admissible.
pub fn weights(nx: usize, ny: usize, full_support: bool) -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<Vec<u32>>)> {
    let lo = if full_support { 1 } else { 0 };
    (
        prop::collection::vec(prop::collection::vec(lo..6u32, ny), nx),
        prop::collection::vec(prop::collection::vec(1..8u32, ny), nx),
        prop::collection::vec(prop::collection::vec(0..3u32, ny), nx),
    )
        .prop_map(move |(mut w, q, holes)| {
            for row in &mut w {
                if row.iter().all(|&v| v == 0) {
                    row[0] = 1;
                }
            }
            // Metric zeros only where the channel has none.
            let q = q
                .iter()
                .zip(&w)
                .zip(&holes)
                .map(|((qr, wr), hr)| {
                    qr.iter()
                        .zip(wr)
                        .zip(hr)
                        .map(|((&qv, &wv), &h)| if wv == 0 && h == 0 { 0 } else { qv })
                        .collect()
                })
                .collect();
            (w, q)
        })
}

pub fn pair_strategy(max_x: usize, max_y: usize, full_support: bool) -> impl Strategy<Value = ChannelMetricPair> {
    (2..=max_x, 2..=max_y)
        .prop_flat_map(move |(nx, ny)| weights(nx, ny, full_support))
        .prop_map(|(w, q)| build(&w, &q))
}

/// Plain-float view of the matrices, used by the oracles below.
pub fn matrices(pair: &ChannelMetricPair) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let f = |m: &[Vec<Rational>]| {
        m.iter()
            .map(|r| r.iter().map(|v| v.to_f64().unwrap()).collect())
            .collect()
    };
    (f(pair.w_matrix()), f(pair.q_matrix()))
}

/// `-ln sum W(y|a) (q(b,y)/q(a,y))^s` over outputs with `W(y|a) q(a,y) q(b,y) > 0`.
pub fn mu_direct(w: &[Vec<f64>], q: &[Vec<f64>], a: usize, b: usize, s: f64) -> f64 {
    let mut total = 0.0;
    for y in 0..w[a].len() {
        if w[a][y] > 0.0 && q[a][y] > 0.0 && q[b][y] > 0.0 {
            total += w[a][y] * (q[b][y] / q[a][y]).powf(s);
        }
    }
    -total.ln()
}
