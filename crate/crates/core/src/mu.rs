//! The per-letter exponent kernel
//! `mu_{a,b}(s) = -ln sum_{y in Ŷ_{a,b}} W(y|a) (q(b,y)/q(a,y))^s`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::{Float, One, Pow, Zero};

use crate::channel::ChannelMetricPair;
use crate::error::{Error, Result};
use crate::ext::ExtendedReal;
use crate::math::{self, log_sum_exp};
use crate::rational::Rational;

/// Largest `s` tried when bracketing a maximizer.
pub const S_BRACKET_LIMIT: f64 = (1u64 << 20) as f64;
/// Absolute tolerance on maximizers in `s`.
pub const S_TOLERANCE: f64 = 1e-10;

/// Which outputs enter the sum defining `mu`.
///
/// The two conventions differ only at `s = 0`, where outputs with
/// `W(y|a) > 0` but `q(b, y) = 0` contribute `0^0 = 1` under `Full`. Their
/// suprema over `s >= 0` coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumDomain {
    Full,
    #[default]
    QqSupport,
}

/// Behaviour of `mu_{a,b}(s)` as `s -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    DivergesToPlusInfinity,
    FiniteLimit,
    DivergesToMinusInfinity,
}

/// The line `mu(s) ~ -s ln(ratio) + offset` that `mu` approaches from below.
#[derive(Debug, Clone, PartialEq)]
pub struct Asymptote {
    /// Largest metric ratio `q(b,y)/q(a,y)` over outputs reachable from `a`.
    pub ratio: Rational,
    /// `W(·|a)` mass on the outputs attaining `ratio`.
    pub mass: Rational,
    /// `-ln(mass)`.
    pub offset: f64,
    /// True when `mu` coincides with its asymptote.
    pub affine: bool,
}

/// A family of concave functions `mu_{a,b}(s)` indexed by ordered input pairs.
///
/// Values are `f64` with `+inf` for the identically-infinite case.
pub trait MuFamily {
    fn num_inputs(&self) -> usize;
    fn value(&self, a: usize, b: usize, s: f64) -> f64;
    fn slope(&self, a: usize, b: usize, s: f64) -> f64;
    /// `None` when `mu_{a,b}` is identically `+inf`.
    fn asymptote(&self, a: usize, b: usize) -> Option<Asymptote>;
}

#[derive(Debug, Clone)]
struct Term {
    y: usize,
    w: f64,
    ln_w: f64,
    ratio: Rational,
    ln_ratio: f64,
}

#[derive(Debug, Clone)]
struct Row {
    terms: Vec<Term>,
    /// `W(·|a)` mass outside `Ŷ_{a,b}`; enters only under `SumDomain::Full`.
    outside_mass: f64,
    asymptote: Option<Asymptote>,
}

/// Precomputed evaluation data for every ordered input pair of a channel.
#[derive(Debug, Clone)]
pub struct PairKernel {
    nx: usize,
    ny: usize,
    rows: Vec<Row>,
}

impl PairKernel {
    pub fn new(pair: &ChannelMetricPair) -> Self {
        let nx = pair.num_inputs();
        let ny = pair.num_outputs();
        let mut rows = Vec::with_capacity(nx * nx);
        for a in 0..nx {
            for b in 0..nx {
                let mut terms = Vec::new();
                let mut outside_mass = 0.0;
                for y in pair.channel_support(a) {
                    let w = pair.w(a, y);
                    if pair.q(b, y).is_zero() {
                        outside_mass += math::to_f64(w);
                        continue;
                    }
                    let ratio = pair.q(b, y) / pair.q(a, y);
                    terms.push(Term {
                        y,
                        w: math::to_f64(w),
                        ln_w: math::ln_rational(w),
                        ln_ratio: math::ln_rational(&ratio),
                        ratio,
                    });
                }
                let asymptote = terms.iter().map(|t| &t.ratio).max().cloned().map(|ratio| {
                    let mass: Rational = terms
                        .iter()
                        .filter(|t| t.ratio == ratio)
                        .map(|t| pair.w(a, t.y))
                        .sum();
                    Asymptote {
                        affine: terms.iter().all(|t| t.ratio == ratio),
                        offset: -math::ln_rational(&mass),
                        ratio,
                        mass,
                    }
                });
                rows.push(Row {
                    terms,
                    outside_mass,
                    asymptote,
                });
            }
        }
        PairKernel { nx, ny, rows }
    }

    fn row(&self, a: usize, b: usize) -> &Row {
        &self.rows[a * self.nx + b]
    }

    pub fn num_outputs(&self) -> usize {
        self.ny
    }

    /// True when `{y : W(y|a) q(b,y) > 0}` is empty, so `mu_{a,b} = +inf`.
    pub fn empty_support(&self, a: usize, b: usize) -> bool {
        self.row(a, b).terms.is_empty()
    }

    /// True when all log-ratios carrying positive weight coincide.
    pub fn is_affine(&self, a: usize, b: usize) -> bool {
        self.row(a, b).asymptote.as_ref().is_none_or(|x| x.affine)
    }

    pub fn mu(&self, a: usize, b: usize, s: f64) -> Result<ExtendedReal> {
        self.mu_in_domain(a, b, s, SumDomain::QqSupport)
    }

    pub fn mu_in_domain(&self, a: usize, b: usize, s: f64, domain: SumDomain) -> Result<ExtendedReal> {
        check_s(s)?;
        if domain == SumDomain::Full && s == 0.0 {
            return Ok(if a == b || self.row(a, b).outside_mass + self.mass_in(a, b) > 0.0 {
                // Every output of `a` counts with weight one, so the sum is 1.
                ExtendedReal::ZERO
            } else {
                ExtendedReal::PosInfinity
            });
        }
        Ok(self.value(a, b, s).into())
    }

    fn mass_in(&self, a: usize, b: usize) -> f64 {
        self.row(a, b).terms.iter().map(|t| t.w).sum()
    }

    pub fn mu_prime(&self, a: usize, b: usize, s: f64) -> Result<ExtendedReal> {
        check_s(s)?;
        Ok(self.slope(a, b, s).into())
    }

    /// `mu''_{a,b}(s)`: minus the variance of the log-ratio under the tilted law.
    pub fn mu_second(&self, a: usize, b: usize, s: f64) -> Result<f64> {
        check_s(s)?;
        let row = self.row(a, b);
        if row.terms.is_empty() || a == b {
            return Ok(0.0);
        }
        let v = self.tilt_weights(row, s);
        let mean: f64 = row.terms.iter().zip(&v).map(|(t, p)| p * t.ln_ratio).sum();
        let var: f64 = row
            .terms
            .iter()
            .zip(&v)
            .map(|(t, p)| p * (t.ln_ratio - mean).powi(2))
            .sum();
        Ok(-var)
    }

    /// `lim_{s -> inf} mu'_{a,b}(s) = min_{W(y|a) > 0} ln(q(a,y)/q(b,y))`.
    pub fn mu_prime_limit(&self, a: usize, b: usize) -> ExtendedReal {
        match &self.row(a, b).asymptote {
            None => ExtendedReal::PosInfinity,
            Some(x) => ExtendedReal::Finite(-math::ln_rational(&x.ratio)),
        }
    }

    /// Exact classification of `lim_{s -> inf} mu_{a,b}(s)`.
    pub fn classify_limit(&self, a: usize, b: usize) -> LimitClass {
        match &self.row(a, b).asymptote {
            None => LimitClass::DivergesToPlusInfinity,
            Some(x) => match x.ratio.cmp(&Rational::one()) {
                core::cmp::Ordering::Less => LimitClass::DivergesToPlusInfinity,
                core::cmp::Ordering::Equal => LimitClass::FiniteLimit,
                core::cmp::Ordering::Greater => LimitClass::DivergesToMinusInfinity,
            },
        }
    }

    /// The finite limit `-ln sum_{ratio = 1} W(y|a)`, when it exists.
    pub fn finite_limit(&self, a: usize, b: usize) -> Option<f64> {
        (self.classify_limit(a, b) == LimitClass::FiniteLimit)
            .then(|| self.row(a, b).asymptote.as_ref().map(|x| x.offset))
            .flatten()
    }

    /// `mu_{x1,x2}(s) = sum_i mu_{x1_i, x2_i}(s)`.
    pub fn mu_sequence(&self, x1: &[usize], x2: &[usize], s: f64) -> Result<ExtendedReal> {
        check_s(s)?;
        self.check_words(x1, x2)?;
        let mut total = 0.0;
        for (&a, &b) in x1.iter().zip(x2) {
            total += self.value(a, b, s);
        }
        Ok(total.into())
    }

    /// Derivative of [`PairKernel::mu_sequence`] in `s`.
    pub fn mu_sequence_prime(&self, x1: &[usize], x2: &[usize], s: f64) -> Result<ExtendedReal> {
        check_s(s)?;
        self.check_words(x1, x2)?;
        Ok(x1.iter().zip(x2).map(|(&a, &b)| self.slope(a, b, s)).sum::<f64>().into())
    }

    fn check_words(&self, x1: &[usize], x2: &[usize]) -> Result<()> {
        if x1.len() != x2.len() {
            return Err(Error::LengthMismatch(x1.len(), x2.len()));
        }
        for &x in x1.iter().chain(x2) {
            if x >= self.nx {
                return Err(Error::SymbolOutOfRange {
                    symbol: x,
                    size: self.nx,
                });
            }
        }
        Ok(())
    }

    /// Supremum and smallest maximizer of `sigma_{a,b} = mu_{a,b} + mu_{b,a}`.
    pub fn sup_sigma(&self, a: usize, b: usize) -> Result<Supremum> {
        sup_sigma(self, a, b)
    }

    /// `ŝ = max_{a,b} argsup sigma_{a,b}`; see [`s_cap`].
    pub fn s_cap(&self) -> Result<f64> {
        s_cap(self)
    }

    fn tilt_weights(&self, row: &Row, s: f64) -> Vec<f64> {
        let logs: Vec<f64> = row.terms.iter().map(|t| t.ln_w + s * t.ln_ratio).collect();
        let z = log_sum_exp(logs.iter().copied());
        logs.iter().map(|l| (l - z).exp()).collect()
    }

    /// `V_s(y|a,b) ∝ W(y|a) (q(b,y)/q(a,y))^s` on `Ŷ_{a,b}`.
    pub fn tilted_distribution(&self, a: usize, b: usize, s: f64) -> Result<Vec<f64>> {
        check_s(s)?;
        let row = self.row(a, b);
        if row.terms.is_empty() {
            return Err(Error::EmptySupport { a, b });
        }
        let mut v = vec![0.0; self.ny];
        for (t, p) in row.terms.iter().zip(self.tilt_weights(row, s)) {
            v[t.y] = p;
        }
        Ok(v)
    }

    /// The tilted conditional distribution for every ordered pair with finite `mu`.
    pub fn tilted(&self, s: f64) -> Result<ConditionalDistribution> {
        check_s(s)?;
        let mut rows = Vec::with_capacity(self.nx * self.nx);
        for a in 0..self.nx {
            for b in 0..self.nx {
                rows.push(self.tilted_distribution(a, b, s).ok());
            }
        }
        Ok(ConditionalDistribution {
            num_inputs: self.nx,
            num_outputs: self.ny,
            rows,
        })
    }
}

impl MuFamily for PairKernel {
    fn num_inputs(&self) -> usize {
        self.nx
    }

    fn value(&self, a: usize, b: usize, s: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let row = self.row(a, b);
        if row.terms.is_empty() {
            return f64::INFINITY;
        }
        -log_sum_exp(row.terms.iter().map(|t| t.ln_w + s * t.ln_ratio))
    }

    fn slope(&self, a: usize, b: usize, s: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let row = self.row(a, b);
        if row.terms.is_empty() {
            return f64::INFINITY;
        }
        if let Some(x) = row.asymptote.as_ref().filter(|x| x.affine) {
            return -math::ln_rational(&x.ratio);
        }
        let v = self.tilt_weights(row, s);
        -row.terms.iter().zip(&v).map(|(t, p)| p * t.ln_ratio).sum::<f64>()
    }

    fn asymptote(&self, a: usize, b: usize) -> Option<Asymptote> {
        if a == b {
            return Some(Asymptote {
                ratio: Rational::one(),
                mass: Rational::one(),
                offset: 0.0,
                affine: true,
            });
        }
        self.row(a, b).asymptote.clone()
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        Err(Error::NegativeS(s))
    } else {
        Ok(())
    }
}

/// A probability vector over outputs for each ordered input pair; `None` rows
/// are undefined (empty support).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    num_inputs: usize,
    num_outputs: usize,
    rows: Vec<Option<Vec<f64>>>,
}

impl ConditionalDistribution {
    pub fn new(num_inputs: usize, num_outputs: usize, rows: Vec<Option<Vec<f64>>>) -> Result<Self> {
        if rows.len() != num_inputs * num_inputs {
            return Err(Error::LengthMismatch(rows.len(), num_inputs * num_inputs));
        }
        for row in rows.iter().flatten() {
            if row.len() != num_outputs {
                return Err(Error::LengthMismatch(row.len(), num_outputs));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDistribution(alloc::format!("row sums to {sum}")));
            }
        }
        Ok(ConditionalDistribution {
            num_inputs,
            num_outputs,
            rows,
        })
    }

    /// `W_1(y|a,b) = W(y|a)`.
    pub fn first_input(pair: &ChannelMetricPair) -> Self {
        Self::from_channel(pair, |a, _| a)
    }

    /// `W_2(y|a,b) = W(y|b)`.
    pub fn second_input(pair: &ChannelMetricPair) -> Self {
        Self::from_channel(pair, |_, b| b)
    }

    fn from_channel(pair: &ChannelMetricPair, pick: impl Fn(usize, usize) -> usize) -> Self {
        let nx = pair.num_inputs();
        let ny = pair.num_outputs();
        let mut rows = Vec::with_capacity(nx * nx);
        for a in 0..nx {
            for b in 0..nx {
                let x = pick(a, b);
                rows.push(Some((0..ny).map(|y| pair.w_f64(x, y)).collect()));
            }
        }
        ConditionalDistribution {
            num_inputs: nx,
            num_outputs: ny,
            rows,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    pub fn row(&self, a: usize, b: usize) -> Option<&[f64]> {
        self.rows[a * self.num_inputs + b].as_deref()
    }
}

/// `D(p || q)` in nats; `+inf` when `p` is not absolutely continuous w.r.t. `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            d += pi * (pi / qi).ln();
        }
    }
    d.max(0.0)
}

/// `sum_{a,b} P(a,b) D(V(·|a,b) || Z(·|a,b))` for a joint distribution `P`
/// given as a row-major `|X| x |X|` matrix.
pub fn conditional_kl(v: &ConditionalDistribution, z: &ConditionalDistribution, p: &[f64]) -> Result<f64> {
    let nx = v.num_inputs;
    if z.num_inputs != nx || p.len() != nx * nx {
        return Err(Error::LengthMismatch(p.len(), nx * nx));
    }
    let mut total = 0.0;
    for a in 0..nx {
        for b in 0..nx {
            let weight = p[a * nx + b];
            if weight == 0.0 {
                continue;
            }
            match (v.row(a, b), z.row(a, b)) {
                (Some(vr), Some(zr)) => total += weight * kl_divergence(vr, zr),
                _ => return Ok(f64::INFINITY),
            }
        }
    }
    Ok(total)
}

/// Result of maximizing a concave function of `s` over `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supremum {
    /// Smallest maximizer; `+inf` when the supremum is approached only as
    /// `s -> infinity`.
    pub argsup: ExtendedReal,
    pub value: ExtendedReal,
}

/// Maximizes `F(s) = sum_k c_k mu_{a_k,b_k}(s)` over `s >= 0`.
///
/// The behaviour at infinity is decided exactly from the product of the
/// asymptotic ratios; a finite maximizer is then found by bracketing and
/// bisecting on the sign of `F'`.
pub fn sup_mixture<F: MuFamily + ?Sized>(family: &F, terms: &[(usize, usize, u64)]) -> Result<Supremum> {
    let terms: Vec<_> = terms.iter().copied().filter(|&(a, b, c)| a != b && c > 0).collect();
    if terms.is_empty() {
        return Ok(Supremum {
            argsup: ExtendedReal::ZERO,
            value: ExtendedReal::ZERO,
        });
    }
    let mut product = Rational::one();
    let mut offset = 0.0;
    let mut affine = true;
    for &(a, b, c) in &terms {
        let Some(x) = family.asymptote(a, b) else {
            return Ok(Supremum {
                argsup: ExtendedReal::ZERO,
                value: ExtendedReal::PosInfinity,
            });
        };
        product *= Pow::pow(&x.ratio, c);
        offset += c as f64 * x.offset;
        affine &= x.affine;
    }
    let f = |s: f64| terms.iter().map(|&(a, b, c)| c as f64 * family.value(a, b, s)).sum::<f64>();
    let df = |s: f64| terms.iter().map(|&(a, b, c)| c as f64 * family.slope(a, b, s)).sum::<f64>();

    match product.cmp(&Rational::one()) {
        core::cmp::Ordering::Less => Ok(Supremum {
            argsup: ExtendedReal::PosInfinity,
            value: ExtendedReal::PosInfinity,
        }),
        core::cmp::Ordering::Equal if affine => Ok(Supremum {
            argsup: ExtendedReal::ZERO,
            value: offset.into(),
        }),
        core::cmp::Ordering::Equal => Ok(Supremum {
            argsup: ExtendedReal::PosInfinity,
            value: offset.into(),
        }),
        core::cmp::Ordering::Greater => {
            let s = maximize_concave(df)?;
            Ok(Supremum {
                argsup: s.into(),
                value: f(s).into(),
            })
        }
    }
}

/// Smallest maximizer over `[0, inf)` of a concave function with derivative
/// `df` that eventually turns negative.
pub(crate) fn maximize_concave(df: impl Fn(f64) -> f64) -> Result<f64> {
    if df(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while df(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > S_BRACKET_LIMIT {
            return Err(Error::NonConvergence("no sign change of the derivative below 2^20".into()));
        }
    }
    bisect_sign(df, lo, hi)
}

/// Bisects `[lo, hi]` with `df(lo) > 0 >= df(hi)` down to [`S_TOLERANCE`].
pub(crate) fn bisect_sign(df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= S_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let d = df(mid);
        if d > 0.0 {
            lo = mid;
        } else if d < 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Supremum of `sigma_{a,b} = mu_{a,b} + mu_{b,a}`.
///
/// Errors with [`Error::InfiniteExponent`] when the supremum is `+inf`.
pub fn sup_sigma<F: MuFamily + ?Sized>(family: &F, a: usize, b: usize) -> Result<Supremum> {
    let sup = sup_mixture(family, &[(a, b, 1), (b, a, 1)])?;
    if sup.value.is_pos_infinite() {
        return Err(Error::InfiniteExponent { a, b });
    }
    Ok(sup)
}

/// `max_{a,b} argsup sigma_{a,b}`. Fails when some pair attains its
/// supremum only in the limit, which happens exactly for boundary pairs that
/// are not balanced.
pub fn s_cap<F: MuFamily + ?Sized>(family: &F) -> Result<f64> {
    let n = family.num_inputs();
    let mut cap: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let sup = sup_sigma(family, a, b)?;
            match sup.argsup.finite() {
                Some(s) => cap = cap.max(s),
                None => return Err(Error::UnattainedSupremum { a, b }),
            }
        }
    }
    Ok(cap)
}
