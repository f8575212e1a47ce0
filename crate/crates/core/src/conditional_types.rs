//! Types and conditional types of output sequences.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::channel::ChannelMetricPair;
use crate::codebook::{joint_type, JointType};
use crate::error::{Error, Result};
use crate::math;
use crate::mu::{kl_divergence, ConditionalDistribution};
use crate::rational::Rational;

/// Rounds a probability vector to a type with denominator `n`, moving each
/// entry by less than `1/n` and keeping zeros at zero (largest remainder).
pub fn quantize_to_type(dist: &[f64], n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let sum: f64 = dist.iter().sum();
    if dist.is_empty() || dist.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    let scaled: Vec<f64> = dist
        .iter()
        .map(|&p| {
            let x = p * n as f64;
            if (x - x.round()).abs() < 1e-9 {
                x.round()
            } else {
                x
            }
        })
        .collect();
    let mut counts: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..dist.len()).filter(|&i| dist[i] > 0.0).collect();
    order.sort_by(|&i, &j| {
        let fi = scaled[i] - scaled[i].floor();
        let fj = scaled[j] - scaled[j].floor();
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    let mut left = n.saturating_sub(assigned);
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    Ok(counts)
}

/// Output counts per joint cell: `counts[(a * |X| + b) * |Y| + y]` outputs
/// equal to `y` among the coordinates where `(x1, x2) = (a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalType {
    num_inputs: usize,
    num_outputs: usize,
    counts: Vec<u64>,
}

impl ConditionalType {
    pub fn new(num_inputs: usize, num_outputs: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != num_inputs * num_inputs * num_outputs {
            return Err(Error::LengthMismatch(counts.len(), num_inputs * num_inputs * num_outputs));
        }
        Ok(ConditionalType {
            num_inputs,
            num_outputs,
            counts,
        })
    }

    /// The conditional type of `y` given `(x1, x2)`.
    pub fn of_sequences(num_inputs: usize, num_outputs: usize, x1: &[usize], x2: &[usize], y: &[usize]) -> Result<Self> {
        if x1.len() != x2.len() || x1.len() != y.len() {
            return Err(Error::LengthMismatch(x1.len(), y.len()));
        }
        let mut counts = vec![0; num_inputs * num_inputs * num_outputs];
        for ((&a, &b), &o) in x1.iter().zip(x2).zip(y) {
            counts[(a * num_inputs + b) * num_outputs + o] += 1;
        }
        Self::new(num_inputs, num_outputs, counts)
    }

    /// Converts a conditional distribution whose cell counts
    /// `n P(a,b) V(y|a,b)` are integers.
    pub fn from_distribution(jt: &JointType, v: &ConditionalDistribution) -> Result<Self> {
        let nx = v.num_inputs();
        let ny = v.num_outputs();
        let mut counts = vec![0; nx * nx * ny];
        for a in 0..nx {
            for b in 0..nx {
                let cell = jt.count(a, b);
                if cell == 0 {
                    continue;
                }
                let row = v.row(a, b).ok_or_else(|| Error::NonIntegralType(format!("row ({a}, {b}) undefined")))?;
                for y in 0..ny {
                    let x = cell as f64 * row[y];
                    if (x - x.round()).abs() > 1e-9 {
                        return Err(Error::NonIntegralType(format!(
                            "cell ({a}, {b}) output {y} holds {x} sequences"
                        )));
                    }
                    counts[(a * nx + b) * ny + y] = x.round() as u64;
                }
            }
        }
        Self::new(nx, ny, counts)
    }

    pub fn count(&self, a: usize, b: usize, y: usize) -> u64 {
        self.counts[(a * self.num_inputs + b) * self.num_outputs + y]
    }

    fn cell(&self, a: usize, b: usize) -> &[u64] {
        let start = (a * self.num_inputs + b) * self.num_outputs;
        &self.counts[start..start + self.num_outputs]
    }
}

/// `N! / prod_i k_i!`.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let mut result = BigInt::one();
    let mut total = 0u64;
    for &k in parts {
        for i in 1..=k {
            total += 1;
            result *= total;
            result /= i;
        }
    }
    result
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeClassProbability {
    /// `W^n(T_V | x1)`.
    pub exact: Rational,
    /// `(n+1)^{-|X|^2 |Y|} exp(-n D(V || W_1 | P))`.
    pub bound: f64,
    /// `D(V || W_1 | P)`.
    pub divergence: f64,
}

/// Probability under `W^n(·|x1)` of the set of outputs with conditional
/// type `v` given `(x1, x2)`, and the lower bound from the method of types.
pub fn type_class_probability(
    pair: &ChannelMetricPair,
    x1: &[usize],
    x2: &[usize],
    v: &ConditionalType,
) -> Result<TypeClassProbability> {
    let nx = pair.num_inputs();
    let ny = pair.num_outputs();
    if v.num_inputs != nx || v.num_outputs != ny {
        return Err(Error::LengthMismatch(v.num_outputs, ny));
    }
    let jt = joint_type(nx, x1, x2)?;
    let n = x1.len() as u64;
    let mut exact = Rational::one();
    let mut divergence = 0.0;
    for a in 0..nx {
        for b in 0..nx {
            let cell = v.cell(a, b);
            let total: u64 = cell.iter().sum();
            if total != jt.count(a, b) {
                return Err(Error::NonIntegralType(format!(
                    "cell ({a}, {b}) has {total} outputs but the joint type has {}",
                    jt.count(a, b)
                )));
            }
            if total == 0 {
                continue;
            }
            exact *= Rational::from_integer(multinomial(cell));
            for (y, &k) in cell.iter().enumerate() {
                if k > 0 {
                    exact *= Pow::pow(pair.w(a, y), k);
                }
            }
            let emp: Vec<f64> = cell.iter().map(|&k| k as f64 / total as f64).collect();
            let w: Vec<f64> = (0..ny).map(|y| pair.w_f64(a, y)).collect();
            divergence += total as f64 / n as f64 * kl_divergence(&emp, &w);
        }
    }
    let exponent = (nx * nx * ny) as f64;
    let bound = if divergence.is_infinite() {
        0.0
    } else {
        (-(exponent * ((n + 1) as f64).ln()) - n as f64 * divergence).exp()
    };
    if !exact.is_zero() && math::ln_rational(&exact) < bound.ln() - 1e-9 {
        return Err(Error::Internal("type-class probability below its lower bound".into()));
    }
    Ok(TypeClassProbability {
        exact,
        bound,
        divergence,
    })
}

/// Calls `f` with every composition of `total` into `parts` nonnegative parts.
pub fn for_each_composition(total: u64, parts: usize, f: &mut impl FnMut(&[u64])) {
    fn go(i: usize, left: u64, buf: &mut [u64], f: &mut impl FnMut(&[u64])) {
        if i + 1 == buf.len() {
            buf[i] = left;
            f(buf);
            return;
        }
        for k in 0..=left {
            buf[i] = k;
            go(i + 1, left - k, buf, f);
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut buf = vec![0; parts];
    go(0, total, &mut buf, f);
}

/// Number of compositions of `total` into `parts` parts, `C(total+parts-1, parts-1)`.
pub fn composition_count(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c.saturating_mul(total as u128 + i) / i;
    }
    c
}

/// All conditional types given `(x1, x2)` over the full output alphabet.
pub fn all_conditional_types(num_inputs: usize, num_outputs: usize, x1: &[usize], x2: &[usize]) -> Result<Vec<ConditionalType>> {
    let jt = joint_type(num_inputs, x1, x2)?;
    let mut out = vec![ConditionalType::new(num_inputs, num_outputs, vec![0; num_inputs * num_inputs * num_outputs])?];
    for a in 0..num_inputs {
        for b in 0..num_inputs {
            let n = jt.count(a, b);
            if n == 0 {
                continue;
            }
            let mut next = Vec::new();
            for base in &out {
                for_each_composition(n, num_outputs, &mut |c| {
                    let mut t = base.clone();
                    let start = (a * num_inputs + b) * num_outputs;
                    t.counts[start..start + num_outputs].copy_from_slice(c);
                    next.push(t);
                });
            }
            out = next;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_to_type(&[0.25, 0.75], 4).unwrap(), vec![1, 3]);
        let q = quantize_to_type(&[1.0 / 3.0, 2.0 / 3.0], 4).unwrap();
        assert_eq!(q.iter().sum::<u64>(), 4);
        assert!((q[0] as f64 / 4.0 - 1.0 / 3.0).abs() <= 0.25);
        assert_eq!(quantize_to_type(&[0.0, 1.0], 7).unwrap(), vec![0, 7]);
        assert_eq!(quantize_to_type(&[0.1, 0.2, 0.7], 10).unwrap(), vec![1, 2, 7]);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 2]), BigInt::from(6));
        assert_eq!(multinomial(&[1, 1, 1]), BigInt::from(6));
        assert_eq!(multinomial(&[]), BigInt::from(1));
        assert_eq!(composition_count(4, 3), 15);
    }

    #[test]
    fn bsc_binomial_classes() {
        let p = fixtures::bsc(ratio(1, 4));
        let x = [0, 0, 1, 1];
        let types = all_conditional_types(2, 2, &x, &x).unwrap();
        assert_eq!(types.len(), 9);
        let mut total = Rational::zero();
        for v in &types {
            let r = type_class_probability(&p, &x, &x, v).unwrap();
            assert!(r.exact >= Rational::zero());
            total += r.exact;
        }
        assert_eq!(total, Rational::one());
        // Both zeros received as zero and both ones flipped: (3/4)^2 (1/4)^2.
        let v = ConditionalType::of_sequences(2, 2, &x, &x, &[0, 0, 0, 0]).unwrap();
        assert_eq!(type_class_probability(&p, &x, &x, &v).unwrap().exact, ratio(9, 256));
    }

    #[test]
    fn impossible_class() {
        let p = fixtures::noiseless(2);
        let v = ConditionalType::of_sequences(2, 2, &[0], &[1], &[1]).unwrap();
        let r = type_class_probability(&p, &[0], &[1], &v).unwrap();
        assert!(r.exact.is_zero());
        assert_eq!(r.bound, 0.0);
        assert!(r.divergence.is_infinite());
    }

    #[test]
    fn mismatched_counts_rejected() {
        let p = fixtures::bsc(ratio(1, 4));
        let v = ConditionalType::new(2, 2, vec![2, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert!(matches!(type_class_probability(&p, &[0], &[0], &v), Err(Error::NonIntegralType(_))));
    }
}
