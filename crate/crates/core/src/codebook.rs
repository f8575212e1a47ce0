//! Codebooks, joint types, pairwise distances and symmetric subcodes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::exponent::{self, ExponentOptions};
use crate::ext::ExtendedReal;
use crate::mu::{self, MuFamily, Supremum};
use crate::rational::Rational;

/// `M >= 2` codewords of common length `n >= 1` over `{0, .., num_inputs-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    num_inputs: usize,
    words: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn new(num_inputs: usize, words: Vec<Vec<usize>>) -> Result<Self> {
        if words.len() < 2 {
            return Err(Error::InvalidCodebook(format!("needs at least 2 codewords, got {}", words.len())));
        }
        let n = words[0].len();
        if n == 0 {
            return Err(Error::InvalidCodebook("codewords are empty".into()));
        }
        for (m, w) in words.iter().enumerate() {
            if w.len() != n {
                return Err(Error::InvalidCodebook(format!("codeword {m} has length {}, expected {n}", w.len())));
            }
            if let Some(&x) = w.iter().find(|&&x| x >= num_inputs) {
                return Err(Error::SymbolOutOfRange {
                    symbol: x,
                    size: num_inputs,
                });
            }
        }
        Ok(Codebook { num_inputs, words })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn blocklength(&self) -> usize {
        self.words[0].len()
    }

    pub fn word(&self, m: usize) -> &[usize] {
        &self.words[m]
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// The codewords at `indices`, in that order.
    pub fn subcode(&self, indices: &[usize]) -> Result<Codebook> {
        let words = indices
            .iter()
            .map(|&i| {
                self.words
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidCodebook(format!("index {i} out of range")))
            })
            .collect::<Result<_>>()?;
        Codebook::new(self.num_inputs, words)
    }

    /// `M_c(a)`: number of codewords with symbol `a` in column `c`.
    pub fn column_count(&self, c: usize, a: usize) -> u64 {
        self.words.iter().filter(|w| w[c] == a).count() as u64
    }
}

/// Empirical distribution of letter pairs, stored as counts out of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointType {
    num_inputs: usize,
    n: u64,
    counts: Vec<u64>,
}

impl JointType {
    pub fn blocklength(&self) -> u64 {
        self.n
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.num_inputs + b]
    }

    /// `P(a, b)` as an exact rational.
    pub fn p(&self, a: usize, b: usize) -> Rational {
        Rational::new(self.count(a, b).into(), self.n.into())
    }

    pub fn p_f64(&self, a: usize, b: usize) -> f64 {
        self.count(a, b) as f64 / self.n as f64
    }

    /// Row-major probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    pub fn transpose(&self) -> JointType {
        let k = self.num_inputs;
        let mut counts = vec![0; k * k];
        for a in 0..k {
            for b in 0..k {
                counts[b * k + a] = self.counts[a * k + b];
            }
        }
        JointType {
            num_inputs: k,
            n: self.n,
            counts,
        }
    }

    /// `(a, b, count)` for every nonzero cell.
    pub fn cells(&self) -> Vec<(usize, usize, u64)> {
        let k = self.num_inputs;
        (0..k * k)
            .filter(|&i| self.counts[i] > 0)
            .map(|i| (i / k, i % k, self.counts[i]))
            .collect()
    }

    /// `floor(t P(a,b))` per cell.
    pub fn quantize(&self, t: u64) -> Vec<u64> {
        self.counts.iter().map(|&c| t * c / self.n).collect()
    }
}

pub fn joint_type(num_inputs: usize, x1: &[usize], x2: &[usize]) -> Result<JointType> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch(x1.len(), x2.len()));
    }
    if x1.is_empty() {
        return Err(Error::InvalidArgument("empty sequences".into()));
    }
    let mut counts = vec![0u64; num_inputs * num_inputs];
    for (&a, &b) in x1.iter().zip(x2) {
        let bad = a.max(b);
        if bad >= num_inputs {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                size: num_inputs,
            });
        }
        counts[a * num_inputs + b] += 1;
    }
    Ok(JointType {
        num_inputs,
        n: x1.len() as u64,
        counts,
    })
}

/// Both directional suprema behind a pairwise distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistance {
    /// `min` of the two normalized suprema.
    pub value: ExtendedReal,
    /// `sup_s mu_{x1,x2}(s)` (not normalized).
    pub forward: Supremum,
    /// `sup_s mu_{x2,x1}(s)` (not normalized).
    pub backward: Supremum,
}

/// `min{sup_s mu_{x1,x2}(s), sup_s mu_{x2,x1}(s)} / n`.
pub fn pair_distance<F: MuFamily + ?Sized>(family: &F, x1: &[usize], x2: &[usize]) -> Result<PairDistance> {
    let jt = joint_type(family.num_inputs(), x1, x2)?;
    pair_distance_from_type(family, &jt)
}

pub fn pair_distance_from_type<F: MuFamily + ?Sized>(family: &F, jt: &JointType) -> Result<PairDistance> {
    let forward = mu::sup_mixture(family, &jt.cells())?;
    let backward = mu::sup_mixture(family, &jt.transpose().cells())?;
    let n = jt.n as f64;
    let value = forward.value.min(backward.value) * (1.0 / n);
    Ok(PairDistance {
        value,
        forward,
        backward,
    })
}

/// Smallest pairwise distance and the first unordered pair attaining it.
pub fn d_min<F: MuFamily + ?Sized>(family: &F, code: &Codebook) -> Result<(ExtendedReal, (usize, usize))> {
    let mut best: Option<(ExtendedReal, (usize, usize))> = None;
    for i in 0..code.len() {
        for j in i + 1..code.len() {
            let d = pair_distance(family, code.word(i), code.word(j))?.value;
            if best.as_ref().is_none_or(|(v, _)| d < *v) {
                best = Some((d, (i, j)));
            }
        }
    }
    Ok(best.expect("a codebook has at least two codewords"))
}

/// Exponent cap `D_min(C) + ln(M)/n` implied by `P_e >= P_{e,m}/M`.
pub fn pe_lower_bound_from_dmin<F: MuFamily + ?Sized>(family: &F, code: &Codebook) -> Result<ExtendedReal> {
    let (d, _) = d_min(family, code)?;
    Ok(d + ExtendedReal::Finite((code.len() as f64).ln() / code.blocklength() as f64))
}

/// Both sides of the double-counting identity
/// `sum_{m != m'} P_{m,m'}(a,b) = (1/n) sum_c M_c(a) M_c(b)` for `a != b`.
pub fn plotkin_identity(code: &Codebook, a: usize, b: usize) -> Result<(Rational, Rational)> {
    if a == b {
        return Err(Error::SameSymbols);
    }
    for x in [a, b] {
        if x >= code.num_inputs() {
            return Err(Error::SymbolOutOfRange {
                symbol: x,
                size: code.num_inputs(),
            });
        }
    }
    let mut lhs = Rational::zero();
    for i in 0..code.len() {
        for j in 0..code.len() {
            if i != j {
                lhs += joint_type(code.num_inputs(), code.word(i), code.word(j))?.p(a, b);
            }
        }
    }
    let n = code.blocklength() as u64;
    let total: u64 = (0..code.blocklength())
        .map(|c| code.column_count(c, a) * code.column_count(c, b))
        .sum();
    Ok((lhs, Rational::new(total.into(), n.into())))
}

/// `6/sqrt(M̂) + 2 sqrt(2/t) + 3/t`.
pub fn delta_bound(m_hat: usize, t: u64) -> f64 {
    6.0 / (m_hat as f64).sqrt() + 2.0 * (2.0 / t as f64).sqrt() + 3.0 / t as f64
}

/// `6/sqrt(M̂) + 4 sqrt(δ) + 4δ`.
pub fn komlos_bound(m_hat: usize, delta: f64) -> f64 {
    6.0 / (m_hat as f64).sqrt() + 4.0 * delta.sqrt() + 4.0 * delta
}

/// What an extracted subcode actually achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcodeCertificate {
    pub indices: Vec<usize>,
    pub t: u64,
    pub m_hat: usize,
    pub target: usize,
    pub target_reached: bool,
    /// Whether the clique search finished within its budget.
    pub exact_search: bool,
    /// `Δ(M̂, t)`.
    pub delta_bound: f64,
    /// Largest per-cell range of `P_{m,m'}(a,b)` over pairs `m < m'`.
    pub spread: f64,
    /// Largest `|P_{m,m'}(a,b) - P_{m,m'}(b,a)|`.
    pub asymmetry: f64,
    /// Largest `|P_{m,m'}(a,b) - P_{m̄,m̄'}(a,b)|` over all ordered pairs.
    pub observed_delta: f64,
    /// `6/sqrt(M̂) + 4 sqrt(spread) + 4 spread`.
    pub komlos_bound: f64,
}

/// Search nodes allowed per colour class before falling back to the best
/// clique found.
pub const CLIQUE_BUDGET: u64 = 2_000_000;

/// Colours each pair `m < m'` by its joint type quantized to the `1/t` grid
/// and returns the largest monochromatic clique, truncated to `target`.
pub fn komlos_extract(code: &Codebook, t: u64, target: usize) -> Result<SubcodeCertificate> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    if target < 2 || target > code.len() {
        return Err(Error::InvalidArgument(format!(
            "target must lie in [2, {}], got {target}",
            code.len()
        )));
    }
    let m = code.len();
    let mut classes: BTreeMap<Vec<u64>, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            let jt = joint_type(code.num_inputs(), code.word(i), code.word(j))?;
            classes.entry(jt.quantize(t)).or_default().push((i, j));
        }
    }
    let mut best: Option<(Vec<usize>, bool)> = None;
    for edges in classes.values() {
        if best.as_ref().is_some_and(|(b, _)| b.len() >= target) {
            break;
        }
        let mut g = Graph::new(m);
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        let (clique, exact) = g.maximum_clique(CLIQUE_BUDGET);
        if best.as_ref().is_none_or(|(b, _)| clique.len() > b.len()) {
            best = Some((clique, exact));
        }
    }
    let (mut indices, exact_search) = best.expect("at least one pair exists");
    indices.truncate(target);
    certify(code, &indices, t, target, exact_search)
}

/// Certificate quantities for a given subcode.
pub fn certify(code: &Codebook, indices: &[usize], t: u64, target: usize, exact_search: bool) -> Result<SubcodeCertificate> {
    let sub = code.subcode(indices)?;
    let k = code.num_inputs();
    let mut lo = vec![f64::INFINITY; k * k];
    let mut hi = vec![f64::NEG_INFINITY; k * k];
    let mut asymmetry: f64 = 0.0;
    for i in 0..sub.len() {
        for j in 0..sub.len() {
            if i == j {
                continue;
            }
            let p = joint_type(k, sub.word(i), sub.word(j))?.probabilities();
            for a in 0..k {
                for b in 0..k {
                    asymmetry = asymmetry.max((p[a * k + b] - p[b * k + a]).abs());
                }
            }
            if i < j {
                for c in 0..k * k {
                    lo[c] = lo[c].min(p[c]);
                    hi[c] = hi[c].max(p[c]);
                }
            }
        }
    }
    let spread = (0..k * k).map(|c| hi[c] - lo[c]).fold(0.0, f64::max);
    // Over ordered pairs the range per cell is the range over `m < m'` of
    // both P(a,b) and P(b,a).
    let observed_delta = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| hi[a * k + b].max(hi[b * k + a]) - lo[a * k + b].min(lo[b * k + a]))
        .fold(0.0, f64::max);
    let m_hat = sub.len();
    Ok(SubcodeCertificate {
        indices: indices.to_vec(),
        t,
        m_hat,
        target,
        target_reached: m_hat >= target,
        exact_search,
        delta_bound: delta_bound(m_hat, t),
        spread,
        asymmetry,
        observed_delta,
        komlos_bound: komlos_bound(m_hat, spread),
    })
}

/// One line of the chain bounding `D_min(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLine {
    pub label: &'static str,
    pub value: f64,
}

/// The chain `D_min(C) <= D_min(Ĉ) <= ... <= M̂/(M̂-1) sup_s max_Q objective + 5KΔ`
/// evaluated on a concrete subcode.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub lines: Vec<ChainLine>,
    /// `lines[i+1] - lines[i]`.
    pub slacks: Vec<f64>,
    pub holds: bool,
    pub anchor: (usize, usize),
    pub s_bar_anchor: f64,
    /// Largest `s̄_{m,m'}` over the subcode; at most `ŝ`.
    pub s_bar_max: f64,
    pub s_cap: f64,
    pub k: f64,
    /// `Δ(M̂, t)`.
    pub delta_nominal: f64,
    /// The subcode's observed ordered-pair range.
    pub delta_observed: f64,
    /// `max(Δ(M̂, t), observed)`, the value used in the slack terms.
    pub delta_used: f64,
    /// `max_m̄ |mu_m̄(s̄_m̄) - mu_m̄(s̄_anchor)| / n`.
    pub closeness: f64,
    /// `4 K Δ_used`.
    pub closeness_bound: f64,
}

/// Tolerance for judging a chain inequality numerically.
pub const CHAIN_TOLERANCE: f64 = 1e-9;

/// Evaluates every line of the chain that bounds `D_min` on `code` through
/// the symmetric subcode `subcode`.
///
/// `family` must have a finite `ŝ`: the raw kernel of a balanced pair, or
/// the relaxed kernel otherwise.
pub fn dmin_certificate<F: MuFamily + ?Sized>(
    family: &F,
    code: &Codebook,
    subcode: &[usize],
    t: u64,
    opts: &ExponentOptions,
) -> Result<ChainReport> {
    let s_cap = mu::s_cap(family)?;
    let sub = code.subcode(subcode)?;
    let k_in = family.num_inputs();
    let n = code.blocklength() as f64;
    let m_hat = sub.len();
    let cert = certify(code, subcode, t, m_hat, true)?;
    let delta_nominal = delta_bound(m_hat, t);
    let delta_used = delta_nominal.max(cert.observed_delta);

    let steps = ((s_cap / 1e-3).ceil() as usize).max(1);
    let k_const = (0..=steps)
        .map(|i| s_cap * i as f64 / steps as f64)
        .map(|s| {
            (0..k_in)
                .flat_map(|a| (0..k_in).map(move |b| (a, b)))
                .map(|(a, b)| family.value(a, b, s).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);

    let (d_code, _) = d_min(family, code)?;
    let (d_sub, _) = d_min(family, &sub)?;

    // Per ordered pair: distance, joint type and s̄.
    struct PairData {
        distance: f64,
        jt: JointType,
        s_bar: f64,
    }
    let mut pairs: Vec<((usize, usize), PairData)> = Vec::new();
    for i in 0..m_hat {
        for j in 0..m_hat {
            if i == j {
                continue;
            }
            let jt = joint_type(k_in, sub.word(i), sub.word(j))?;
            let pd = pair_distance_from_type(family, &jt)?;
            let s_bar = pd.forward.argsup.min(pd.backward.argsup).finite().ok_or_else(|| {
                Error::Internal(format!("both directional suprema of pair ({i}, {j}) are unattained"))
            })?;
            let distance = pd
                .value
                .finite()
                .ok_or(Error::InfiniteExponent { a: i, b: j })?;
            pairs.push(((i, j), PairData { distance, jt, s_bar }));
        }
    }
    let count = pairs.len() as f64;
    let mu_at = |jt: &JointType, s: f64| jt.cells().iter().map(|&(a, b, c)| c as f64 * family.value(a, b, s)).sum::<f64>();

    let anchor = pairs[0].0;
    let s_bar_anchor = pairs[0].1.s_bar;
    let average_d = pairs.iter().map(|(_, p)| p.distance).sum::<f64>() / count;
    let own = pairs.iter().map(|(_, p)| mu_at(&p.jt, p.s_bar) / n).sum::<f64>() / count;
    let anchored = pairs.iter().map(|(_, p)| mu_at(&p.jt, s_bar_anchor) / n).sum::<f64>() / count;
    let closeness = pairs
        .iter()
        .map(|(_, p)| (mu_at(&p.jt, p.s_bar) - mu_at(&p.jt, s_bar_anchor)).abs() / n)
        .fold(0.0, f64::max);
    let s_bar_max = pairs.iter().map(|(_, p)| p.s_bar).fold(0.0, f64::max);

    let mut column_sum = 0.0;
    for c in 0..sub.blocklength() {
        for a in 0..k_in {
            for b in 0..k_in {
                let w = (sub.column_count(c, a) * sub.column_count(c, b)) as f64;
                if w > 0.0 && a != b {
                    column_sum += w * family.value(a, b, s_bar_anchor);
                }
            }
        }
    }
    let plotkin = column_sum / (n * count);

    let factor = m_hat as f64 / (m_hat as f64 - 1.0);
    let (_, q_at_anchor) = exponent::maximize_over_q(family, s_bar_anchor, opts.method, opts)?;
    let best = exponent::family_exponent(family, opts)?.value;
    let slack1 = k_const * delta_used;
    let slack5 = 5.0 * slack1;

    let lines = vec![
        ChainLine { label: "d_min_code", value: d_code.to_f64() },
        ChainLine { label: "d_min_subcode", value: d_sub.to_f64() },
        ChainLine { label: "pair_average", value: average_d },
        ChainLine { label: "own_s_bar_average_plus_k_delta", value: own + slack1 },
        ChainLine { label: "anchored_average_plus_5k_delta", value: anchored + slack5 },
        ChainLine { label: "column_count_form_plus_5k_delta", value: plotkin + slack5 },
        ChainLine { label: "max_q_at_anchor_plus_5k_delta", value: factor * q_at_anchor + slack5 },
        ChainLine { label: "sup_s_max_q_plus_5k_delta", value: factor * best + slack5 },
    ];
    let slacks: Vec<f64> = lines.windows(2).map(|w| w[1].value - w[0].value).collect();
    let holds = slacks
        .iter()
        .zip(lines.windows(2))
        .all(|(s, w)| *s >= -CHAIN_TOLERANCE * (1.0 + w[0].value.abs()));
    Ok(ChainReport {
        lines,
        slacks,
        holds,
        anchor,
        s_bar_anchor,
        s_bar_max,
        s_cap,
        k: k_const,
        delta_nominal,
        delta_observed: cert.observed_delta,
        delta_used,
        closeness,
        closeness_bound: 4.0 * k_const * delta_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mu::PairKernel;
    use crate::rational::ratio;
    use approx::assert_abs_diff_eq;

    const MU_HALF: f64 = 0.143_841_036_225_890_2;

    #[test]
    fn joint_type_examples() {
        let jt = joint_type(2, &[0, 0, 1], &[0, 1, 1]).unwrap();
        assert_eq!(jt.p(0, 0), ratio(1, 3));
        assert_eq!(jt.p(0, 1), ratio(1, 3));
        assert_eq!(jt.p(1, 0), ratio(0, 1));
        assert_eq!(jt.p(1, 1), ratio(1, 3));
        let jt = joint_type(2, &[0, 1], &[1, 0]).unwrap();
        assert_eq!(jt.p(0, 1), ratio(1, 2));
        assert_eq!(jt.p(1, 0), ratio(1, 2));
        assert!(joint_type(2, &[0], &[0, 1]).is_err());
    }

    #[test]
    fn distances_on_bsc() {
        let k = PairKernel::new(&fixtures::bsc(ratio(1, 4)));
        assert_abs_diff_eq!(pair_distance(&k, &[0], &[1]).unwrap().value.to_f64(), MU_HALF, epsilon = 1e-12);
        assert_abs_diff_eq!(pair_distance(&k, &[0, 0], &[0, 1]).unwrap().value.to_f64(), MU_HALF / 2.0, epsilon = 1e-12);
        assert_eq!(pair_distance(&k, &[1, 0], &[1, 0]).unwrap().value, ExtendedReal::ZERO);
        let code = Codebook::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let (d, arg) = d_min(&k, &code).unwrap();
        assert_abs_diff_eq!(d.to_f64(), MU_HALF / 2.0, epsilon = 1e-12);
        assert_eq!(arg, (0, 1));
        let cap = pe_lower_bound_from_dmin(&k, &code).unwrap().to_f64();
        assert_abs_diff_eq!(cap, MU_HALF / 2.0 + 3f64.ln() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn plotkin_small() {
        let code = Codebook::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(plotkin_identity(&code, 0, 1).unwrap(), (ratio(1, 1), ratio(1, 1)));
        assert_eq!(plotkin_identity(&code, 0, 0), Err(Error::SameSymbols));
        let same = Codebook::new(3, vec![vec![2, 1]; 3]).unwrap();
        assert_eq!(plotkin_identity(&same, 0, 1).unwrap(), (ratio(0, 1), ratio(0, 1)));
    }

    #[test]
    fn komlos_on_all_pairs_of_length_two() {
        // At n = 2 the 1/2 grid is exact, so colour classes are the joint
        // types themselves and every class is a star: no triangle exists.
        let code = Codebook::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let c = komlos_extract(&code, 2, 3).unwrap();
        assert_eq!(c.m_hat, 2);
        assert!(!c.target_reached);
        assert_eq!(c.spread, 0.0);
        assert!(c.asymmetry <= c.komlos_bound);
    }

    #[test]
    fn komlos_constant_type_code_is_kept_whole() {
        // Cyclic shifts of 0011: every pair at distance 2 or 4 shares a quantized class at t = 1.
        let code = Codebook::new(2, vec![vec![0, 0, 1, 1], vec![0, 1, 1, 0], vec![1, 1, 0, 0], vec![1, 0, 0, 1]]).unwrap();
        let c = komlos_extract(&code, 1, 4).unwrap();
        assert_eq!(c.m_hat, 4);
        assert!(c.target_reached);
    }

    #[test]
    fn chain_on_two_codewords() {
        let k = PairKernel::new(&fixtures::bsc(ratio(1, 4)));
        let code = Codebook::new(2, vec![vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let r = dmin_certificate(&k, &code, &[0, 1], 4, &ExponentOptions::default()).unwrap();
        assert!(r.holds, "{r:?}");
        assert_abs_diff_eq!(r.lines[0].value, r.lines[2].value, epsilon = 1e-12);
        assert!(r.s_bar_max <= r.s_cap + 1e-9);
    }
}
