//! Exact decisions for zero mismatched zero-error capacity and for the
//! balanced-pair property.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::channel::ChannelMetricPair;
use crate::rational::{ExtRatio, Rational};

/// The two extremal metric ratios of an ordered input pair.
///
/// `min_side = min_{W(y|a) > 0} q(a,y)/q(b,y)` and
/// `max_side = max_{W(y|b) > 0} q(a,y)/q(b,y)`, with `x/0 = +inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalRatios {
    pub min_side: ExtRatio,
    pub max_side: ExtRatio,
}

impl ExtremalRatios {
    pub fn of(pair: &ChannelMetricPair, a: usize, b: usize) -> Self {
        let ratio = |y| ExtRatio::of(pair.q(a, y), pair.q(b, y));
        let min_side = pair.channel_support(a).map(ratio).min().expect("rows of W are nonempty");
        let max_side = pair.channel_support(b).map(ratio).max().expect("rows of W are nonempty");
        ExtremalRatios { min_side, max_side }
    }

    pub fn satisfies_condition(&self) -> bool {
        self.min_side <= self.max_side
    }

    pub fn is_equality(&self) -> bool {
        self.min_side == self.max_side
    }
}

/// A pair violating one of the zero-capacity conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub a: usize,
    pub b: usize,
    pub ratios: ExtremalRatios,
    /// For an equality pair: whether some output is reachable from both inputs.
    pub overlap: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroErrorReport {
    pub c0bar_zero: bool,
    pub c0_zero: bool,
    /// Violation of the first failing condition, if any.
    pub witness: Option<Witness>,
    /// Off-diagonal ordered pairs whose extremal ratios coincide.
    pub boundary_set: Vec<(usize, usize)>,
}

fn off_diagonal(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
}

fn overlaps(pair: &ChannelMetricPair, a: usize, b: usize) -> bool {
    pair.channel_support(a).any(|y| !pair.w(b, y).is_zero())
}

/// Decides whether the capacity under equiprobable tie-breaking is zero.
pub fn check_c0bar_zero(pair: &ChannelMetricPair) -> (bool, Option<Witness>) {
    for (a, b) in off_diagonal(pair.num_inputs()) {
        let ratios = ExtremalRatios::of(pair, a, b);
        if !ratios.satisfies_condition() {
            return (
                false,
                Some(Witness {
                    a,
                    b,
                    ratios,
                    overlap: None,
                }),
            );
        }
    }
    (true, None)
}

/// Decides whether the capacity under arbitrary tie-breaking is zero.
pub fn check_c0_zero(pair: &ChannelMetricPair) -> (bool, Option<Witness>) {
    let (ok, witness) = check_c0bar_zero(pair);
    if !ok {
        return (false, witness);
    }
    for (a, b) in off_diagonal(pair.num_inputs()) {
        let ratios = ExtremalRatios::of(pair, a, b);
        if ratios.is_equality() && !overlaps(pair, a, b) {
            return (
                false,
                Some(Witness {
                    a,
                    b,
                    ratios,
                    overlap: Some(false),
                }),
            );
        }
    }
    (true, None)
}

/// The ordered off-diagonal pairs attaining equality in the zero-capacity
/// condition. Diagonal pairs attain it trivially and are omitted.
pub fn boundary_set(pair: &ChannelMetricPair) -> Vec<(usize, usize)> {
    off_diagonal(pair.num_inputs())
        .filter(|&(a, b)| ExtremalRatios::of(pair, a, b).is_equality())
        .collect()
}

pub fn zero_error_report(pair: &ChannelMetricPair) -> ZeroErrorReport {
    let (c0bar_zero, bar_witness) = check_c0bar_zero(pair);
    let (c0_zero, witness) = check_c0_zero(pair);
    ZeroErrorReport {
        c0bar_zero,
        c0_zero,
        witness: bar_witness.or(witness),
        boundary_set: boundary_set(pair),
    }
}

/// Two outputs on which a boundary pair has different metric ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceViolation {
    pub a: usize,
    pub b: usize,
    pub y1: usize,
    pub ratio1: Rational,
    pub y2: usize,
    pub ratio2: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceReport {
    pub balanced: bool,
    pub c0bar_zero: bool,
    pub violation: Option<BalanceViolation>,
}

/// Checks that the capacity is zero and that every boundary pair has a
/// constant ratio `q(a,y)/q(b,y)` over the outputs in `Ŷ_{a,b}` reachable
/// from `a` or `b`.
pub fn is_balanced(pair: &ChannelMetricPair) -> BalanceReport {
    let (c0bar_zero, _) = check_c0bar_zero(pair);
    if !c0bar_zero {
        return BalanceReport {
            balanced: false,
            c0bar_zero,
            violation: None,
        };
    }
    for (a, b) in boundary_set(pair) {
        let mut reference: Option<(usize, Rational)> = None;
        for y in pair.common_metric_support(a, b) {
            if pair.w(a, y).is_zero() && pair.w(b, y).is_zero() {
                continue;
            }
            let r = pair.q(a, y) / pair.q(b, y);
            match &reference {
                None => reference = Some((y, r)),
                Some((y1, r1)) if *r1 != r => {
                    return BalanceReport {
                        balanced: false,
                        c0bar_zero,
                        violation: Some(BalanceViolation {
                            a,
                            b,
                            y1: *y1,
                            ratio1: r1.clone(),
                            y2: y,
                            ratio2: r,
                        }),
                    };
                }
                Some(_) => {}
            }
        }
    }
    BalanceReport {
        balanced: true,
        c0bar_zero,
        violation: None,
    }
}

/// True when `W(y|x) > 0` exactly where `q(x, y) > 0`.
pub fn is_strict_support_match(pair: &ChannelMetricPair) -> bool {
    (0..pair.num_inputs()).all(|x| {
        (0..pair.num_outputs()).all(|y| pair.w(x, y).is_zero() == pair.q(x, y).is_zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;
    use alloc::vec;

    #[test]
    fn example_one() {
        let p = fixtures::typewriter(ratio(1, 10));
        let r = zero_error_report(&p);
        assert!(r.c0bar_zero && r.c0_zero);
        assert!(r.witness.is_none());
        assert_eq!(r.boundary_set, vec![(0, 1), (0, 2), (1, 0), (2, 0)]);

        let b = is_balanced(&p);
        assert!(!b.balanced);
        let v = b.violation.unwrap();
        assert_eq!((v.a, v.b, v.y1, v.y2), (0, 1, 0, 1));
        assert_eq!(v.ratio1, ratio(18, 1));
        assert_eq!(v.ratio2, ratio(1, 9));
        assert!(!is_strict_support_match(&p));
    }

    #[test]
    fn bsc_is_balanced_with_empty_boundary() {
        let p = fixtures::bsc(ratio(1, 4));
        let r = zero_error_report(&p);
        assert!(r.c0bar_zero && r.c0_zero);
        assert!(r.boundary_set.is_empty());
        assert!(is_balanced(&p).balanced);
        assert!(is_strict_support_match(&p));
    }

    #[test]
    fn noiseless_violates_both() {
        let p = fixtures::noiseless(2);
        let (ok, w) = check_c0bar_zero(&p);
        assert!(!ok);
        let w = w.unwrap();
        assert_eq!((w.a, w.b), (0, 1));
        assert_eq!(w.ratios.min_side, ExtRatio::Infinite);
        assert_eq!(w.ratios.max_side, ExtRatio::Finite(ratio(0, 1)));
        assert!(!check_c0_zero(&p).0);
        assert!(boundary_set(&p).is_empty());
        assert!(!is_balanced(&p).balanced);
    }

    #[test]
    fn equality_without_overlap_separates_the_two_capacities() {
        // Disjoint supports with a constant metric: every comparison is a
        // tie, so equiprobable tie-breaking cannot reach zero error but an
        // adversarial rule can.
        let p = fixtures::constant_metric(vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)]]);
        let (bar, _) = check_c0bar_zero(&p);
        let (c0, w) = check_c0_zero(&p);
        assert!(bar);
        assert!(!c0);
        assert_eq!(w.unwrap().overlap, Some(false));
    }

    #[test]
    fn strict_support_mismatch() {
        let w = vec![vec![ratio(0, 1), ratio(1, 1)], vec![ratio(1, 2), ratio(1, 2)]];
        let q = vec![vec![ratio(1, 1), ratio(1, 1)], vec![ratio(1, 1), ratio(1, 1)]];
        let p = ChannelMetricPair::from_matrices(w, q).unwrap();
        assert!(!is_strict_support_match(&p));
    }
}
