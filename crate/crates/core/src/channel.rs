//! Channel/metric pairs with exact rational entries.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::math;
use crate::rational::{format_rational, Rational};

/// A discrete memoryless channel `W(y|x)` together with a decoding metric
/// `q(x, y)`.
///
/// Invariants, checked on construction: every row of `W` sums to exactly one,
/// all entries are nonnegative, every row of `q` has a positive entry, and
/// the metric is admissible (`W(y|x) > 0` implies `q(x, y) > 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMetricPair {
    name: Option<String>,
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    w: Vec<Vec<Rational>>,
    q: Vec<Vec<Rational>>,
    w_f64: Vec<Vec<f64>>,
}

impl ChannelMetricPair {
    pub fn new(
        name: Option<String>,
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        w: Vec<Vec<Rational>>,
        q: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if input_alphabet.is_empty() {
            return Err(Error::EmptyAlphabet("input"));
        }
        if output_alphabet.is_empty() {
            return Err(Error::EmptyAlphabet("output"));
        }
        check_unique("input", &input_alphabet)?;
        check_unique("output", &output_alphabet)?;
        let (nx, ny) = (input_alphabet.len(), output_alphabet.len());
        check_shape("W", &w, nx, ny)?;
        check_shape("q", &q, nx, ny)?;

        for (matrix, m) in [("W", &w), ("q", &q)] {
            for (x, row) in m.iter().enumerate() {
                if let Some(y) = row.iter().position(|v| v.is_negative()) {
                    return Err(Error::NegativeEntry { matrix, x, y });
                }
            }
        }
        for (x, row) in w.iter().enumerate() {
            let sum: Rational = row.iter().sum();
            if sum != crate::rational::one() {
                return Err(Error::NonStochasticRow {
                    row: x,
                    sum: format_rational(&sum),
                });
            }
        }
        for x in 0..nx {
            if q[x].iter().all(Zero::is_zero) {
                return Err(Error::ZeroMetricRow(x));
            }
            for y in 0..ny {
                if !w[x][y].is_zero() && q[x][y].is_zero() {
                    return Err(Error::Inadmissible { x, y });
                }
            }
        }

        let w_f64 = w
            .iter()
            .map(|row| row.iter().map(math::to_f64).collect())
            .collect();
        Ok(ChannelMetricPair {
            name,
            input_alphabet,
            output_alphabet,
            w,
            q,
            w_f64,
        })
    }

    /// Builds a pair with alphabets labelled `0, 1, ...`.
    pub fn from_matrices(w: Vec<Vec<Rational>>, q: Vec<Vec<Rational>>) -> Result<Self> {
        let nx = w.len();
        let ny = w.first().map_or(0, Vec::len);
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect();
        Self::new(None, labels(nx), labels(ny), w, q)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn input_alphabet(&self) -> &[String] {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &[String] {
        &self.output_alphabet
    }

    pub fn num_inputs(&self) -> usize {
        self.input_alphabet.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_alphabet.len()
    }

    /// `W(y|x)`.
    pub fn w(&self, x: usize, y: usize) -> &Rational {
        &self.w[x][y]
    }

    pub fn w_f64(&self, x: usize, y: usize) -> f64 {
        self.w_f64[x][y]
    }

    /// `q(x, y)`.
    pub fn q(&self, x: usize, y: usize) -> &Rational {
        &self.q[x][y]
    }

    pub fn w_matrix(&self) -> &[Vec<Rational>] {
        &self.w
    }

    pub fn q_matrix(&self) -> &[Vec<Rational>] {
        &self.q
    }

    /// Outputs reachable from input `x`.
    pub fn channel_support(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_outputs()).filter(move |&y| !self.w[x][y].is_zero())
    }

    /// `{y : q(a, y) q(b, y) > 0}`.
    pub fn common_metric_support(&self, a: usize, b: usize) -> BTreeSet<usize> {
        (0..self.num_outputs())
            .filter(|&y| !self.q[a][y].is_zero() && !self.q[b][y].is_zero())
            .collect()
    }

    /// Smallest positive channel entry.
    pub fn w_min(&self) -> Rational {
        self.w
            .iter()
            .flatten()
            .filter(|v| !v.is_zero())
            .min()
            .cloned()
            .expect("validated channel has a positive entry in every row")
    }

    /// The same channel with the metric multiplied by a positive constant.
    pub fn scale_metric(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument("metric scale must be positive".into()));
        }
        let q = self
            .q
            .iter()
            .map(|row| row.iter().map(|v| v * c).collect())
            .collect();
        Self::new(
            self.name.clone(),
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
            self.w.clone(),
            q,
        )
    }

    /// Relabels inputs by `perm`: new input `i` is old input `perm[i]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_inputs();
        let mut seen = alloc::vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        Self::new(
            self.name.clone(),
            perm.iter().map(|&p| self.input_alphabet[p].clone()).collect(),
            self.output_alphabet.clone(),
            perm.iter().map(|&p| self.w[p].clone()).collect(),
            perm.iter().map(|&p| self.q[p].clone()).collect(),
        )
    }

    pub fn support_sets(&self) -> SupportSets {
        SupportSets::of(self)
    }
}

fn check_unique(alphabet: &'static str, labels: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateSymbol {
                alphabet,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

fn check_shape(matrix: &'static str, m: &[Vec<Rational>], nx: usize, ny: usize) -> Result<()> {
    let bad = m.len() != nx || m.iter().any(|r| r.len() != ny);
    if bad {
        return Err(Error::Shape {
            matrix,
            rows: m.len(),
            cols: m.iter().map(Vec::len).find(|&l| l != ny).unwrap_or(ny),
            expected_rows: nx,
            expected_cols: ny,
        });
    }
    Ok(())
}

/// Exact support information derived from a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSets {
    num_inputs: usize,
    y_hat: Vec<BTreeSet<usize>>,
    /// Ordered input pairs whose channel output supports are disjoint.
    pub disjoint_pairs: BTreeSet<(usize, usize)>,
    /// Smallest positive entry of `W`.
    pub w_min: Rational,
}

impl SupportSets {
    fn of(pair: &ChannelMetricPair) -> Self {
        let nx = pair.num_inputs();
        let mut y_hat = Vec::with_capacity(nx * nx);
        let mut disjoint_pairs = BTreeSet::new();
        for a in 0..nx {
            for b in 0..nx {
                y_hat.push(pair.common_metric_support(a, b));
                let overlap = (0..pair.num_outputs())
                    .any(|y| !pair.w(a, y).is_zero() && !pair.w(b, y).is_zero());
                if !overlap {
                    disjoint_pairs.insert((a, b));
                }
            }
        }
        SupportSets {
            num_inputs: nx,
            y_hat,
            disjoint_pairs,
            w_min: pair.w_min(),
        }
    }

    /// `Ŷ_{a,b} = {y : q(a, y) q(b, y) > 0}`.
    pub fn y_hat(&self, a: usize, b: usize) -> &BTreeSet<usize> {
        &self.y_hat[a * self.num_inputs + b]
    }
}

/// A probability vector over the input alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    probs: Vec<f64>,
}

impl InputDistribution {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("negative or non-finite entry".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::InvalidDistribution(alloc::format!("sums to {sum}")));
        }
        Ok(InputDistribution { probs })
    }

    pub fn from_rationals(probs: &[Rational]) -> Result<Self> {
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::InvalidDistribution("negative entry".into()));
        }
        if probs.iter().sum::<Rational>() != crate::rational::one() {
            return Err(Error::InvalidDistribution("does not sum to exactly 1".into()));
        }
        Self::new(probs.iter().map(math::to_f64).collect())
    }

    pub fn uniform(n: usize) -> Self {
        InputDistribution {
            probs: alloc::vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, a: usize) -> Self {
        let mut probs = alloc::vec![0.0; n];
        probs[a] = 1.0;
        InputDistribution { probs }
    }

    pub(crate) fn from_simplex_point(probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        InputDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}
