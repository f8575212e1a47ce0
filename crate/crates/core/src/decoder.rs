//! Error probabilities of the metric decoder `argmax_m prod_i q(x_{m,i}, y_i)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelMetricPair;
use crate::codebook::{joint_type, Codebook};
use crate::conditional_types::{composition_count, for_each_composition, multinomial};
use crate::error::{Error, Result};
use crate::ext::ExtendedReal;
use crate::math;
use crate::mu::{self, PairKernel};
use crate::rational::Rational;

/// How a tie among the best codewords is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Uniformly among the tied codewords.
    #[default]
    Equiprobable,
    /// Every tie is an error.
    AsError,
    /// A tie involving the true codeword is decoded correctly.
    GenieCorrect,
}

impl TiePolicy {
    /// Probability of error when the true message is among `k` tied best codewords.
    fn tie_error(self, k: usize) -> Rational {
        match self {
            TiePolicy::Equiprobable => Rational::new((k as i64 - 1).into(), (k as i64).into()),
            TiePolicy::AsError => Rational::one(),
            TiePolicy::GenieCorrect => Rational::zero(),
        }
    }
}

/// Default limit on output classes for exact enumeration.
pub const DEFAULT_CLASS_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum DecodingMode {
    Exact,
    MonteCarlo {
        trials: u64,
        seed: u64,
        /// Wilson 95% interval for the average error probability.
        interval: (f64, f64),
        half_width: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodingOutcome {
    pub per_message: Vec<f64>,
    /// Exact values in exact mode.
    pub per_message_exact: Option<Vec<Rational>>,
    pub average: f64,
    pub average_exact: Option<Rational>,
    /// Probability (averaged over messages) that the best metric is shared.
    pub tie_mass: f64,
    pub mode: DecodingMode,
}

/// Number of output classes the exact enumeration visits for `(x1, x2)`.
pub fn class_count(pair: &ChannelMetricPair, x1: &[usize], x2: &[usize]) -> Result<u128> {
    let jt = joint_type(pair.num_inputs(), x1, x2)?;
    let mut total: u128 = 1;
    for (a, b, n) in jt.cells() {
        total = total.saturating_mul(composition_count(n, relevant_outputs(pair, a, b).len()));
    }
    Ok(total)
}

fn relevant_outputs(pair: &ChannelMetricPair, a: usize, b: usize) -> Vec<usize> {
    (0..pair.num_outputs())
        .filter(|&y| !pair.w(a, y).is_zero() || !pair.w(b, y).is_zero())
        .collect()
}

struct CellOption {
    p1: Rational,
    p2: Rational,
    q1: Rational,
    q2: Rational,
}

/// Exact error probabilities of a two-codeword code, enumerating output
/// sequences by conditional type class.
pub fn exact_error_probabilities(
    pair: &ChannelMetricPair,
    code: &Codebook,
    policy: TiePolicy,
    budget: u128,
) -> Result<DecodingOutcome> {
    if code.len() != 2 {
        return Err(Error::InvalidCodebook(format!(
            "exact evaluation needs exactly 2 codewords, got {}",
            code.len()
        )));
    }
    let (x1, x2) = (code.word(0), code.word(1));
    let classes = class_count(pair, x1, x2)?;
    if classes > budget {
        return Err(Error::BudgetExceeded { classes, budget });
    }
    let jt = joint_type(pair.num_inputs(), x1, x2)?;
    let mut cells: Vec<Vec<CellOption>> = Vec::new();
    for (a, b, n) in jt.cells() {
        let ys = relevant_outputs(pair, a, b);
        let mut options = Vec::new();
        for_each_composition(n, ys.len(), &mut |ks| {
            let size = Rational::from_integer(multinomial(ks));
            let mut o = CellOption {
                p1: size.clone(),
                p2: size,
                q1: Rational::one(),
                q2: Rational::one(),
            };
            for (&y, &k) in ys.iter().zip(ks) {
                if k > 0 {
                    o.p1 *= Pow::pow(pair.w(a, y), k);
                    o.p2 *= Pow::pow(pair.w(b, y), k);
                    o.q1 *= Pow::pow(pair.q(a, y), k);
                    o.q2 *= Pow::pow(pair.q(b, y), k);
                }
            }
            if !(o.p1.is_zero() && o.p2.is_zero()) {
                options.push(o);
            }
        });
        cells.push(options);
    }

    let tie_error = policy.tie_error(2);
    let mut acc = Accumulator::default();
    enumerate(&cells, 0, Rational::one(), Rational::one(), Rational::one(), Rational::one(), &mut |p1, p2, q1, q2| {
        match q1.cmp(q2) {
            core::cmp::Ordering::Less => acc.e1 += p1,
            core::cmp::Ordering::Greater => acc.e2 += p2,
            core::cmp::Ordering::Equal => {
                acc.e1 += p1 * &tie_error;
                acc.e2 += p2 * &tie_error;
                acc.tie += (p1 + p2) / Rational::from_integer(2.into());
            }
        }
    });
    let average = (&acc.e1 + &acc.e2) / Rational::from_integer(2.into());
    Ok(DecodingOutcome {
        per_message: vec![math::to_f64(&acc.e1), math::to_f64(&acc.e2)],
        average: math::to_f64(&average),
        tie_mass: math::to_f64(&acc.tie),
        per_message_exact: Some(vec![acc.e1, acc.e2]),
        average_exact: Some(average),
        mode: DecodingMode::Exact,
    })
}

#[derive(Default)]
struct Accumulator {
    e1: Rational,
    e2: Rational,
    tie: Rational,
}

fn enumerate(
    cells: &[Vec<CellOption>],
    i: usize,
    p1: Rational,
    p2: Rational,
    q1: Rational,
    q2: Rational,
    leaf: &mut impl FnMut(&Rational, &Rational, &Rational, &Rational),
) {
    if i == cells.len() {
        leaf(&p1, &p2, &q1, &q2);
        return;
    }
    for o in &cells[i] {
        enumerate(cells, i + 1, &p1 * &o.p1, &p2 * &o.p2, &q1 * &o.q1, &q2 * &o.q2, leaf);
    }
}

/// Trials per independently seeded chunk. Results do not depend on how
/// chunks are scheduled.
pub const CHUNK_TRIALS: u64 = 4096;

/// Monte Carlo counts for one chunk or a merge of chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub errors: u64,
    pub ties: u64,
    pub sent: Vec<u64>,
    pub errors_by_message: Vec<u64>,
}

impl Tally {
    pub fn new(messages: usize) -> Self {
        Tally {
            trials: 0,
            errors: 0,
            ties: 0,
            sent: vec![0; messages],
            errors_by_message: vec![0; messages],
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.errors += other.errors;
        self.ties += other.ties;
        for (a, b) in self.sent.iter_mut().zip(&other.sent) {
            *a += b;
        }
        for (a, b) in self.errors_by_message.iter_mut().zip(&other.errors_by_message) {
            *a += b;
        }
    }
}

/// Simulation state shared by all chunks.
pub struct Simulator<'a> {
    pair: &'a ChannelMetricPair,
    code: &'a Codebook,
    policy: TiePolicy,
    cumulative: Vec<Vec<f64>>,
    ln_q: Vec<Vec<f64>>,
}

impl<'a> Simulator<'a> {
    pub fn new(pair: &'a ChannelMetricPair, code: &'a Codebook, policy: TiePolicy) -> Result<Self> {
        if code.num_inputs() != pair.num_inputs() {
            return Err(Error::SymbolOutOfRange {
                symbol: code.num_inputs() - 1,
                size: pair.num_inputs(),
            });
        }
        let ny = pair.num_outputs();
        let cumulative = (0..pair.num_inputs())
            .map(|x| {
                let mut c = 0.0;
                (0..ny)
                    .map(|y| {
                        c += pair.w_f64(x, y);
                        c
                    })
                    .collect()
            })
            .collect();
        let ln_q = (0..pair.num_inputs())
            .map(|x| (0..ny).map(|y| math::ln_rational(pair.q(x, y))).collect())
            .collect();
        Ok(Simulator {
            pair,
            code,
            policy,
            cumulative,
            ln_q,
        })
    }

    fn sample_output(&self, x: usize, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let row = &self.cumulative[x];
        // Never return an output with zero probability, even at the top end.
        let mut last = 0;
        for (y, &c) in row.iter().enumerate() {
            if !self.pair.w(x, y).is_zero() {
                if u < c {
                    return y;
                }
                last = y;
            }
        }
        last
    }

    /// Indices of the codewords with the largest metric, decided exactly.
    fn best_set(&self, y: &[usize], scores: &mut Vec<f64>) -> Vec<usize> {
        scores.clear();
        for w in self.code.words() {
            scores.push(w.iter().zip(y).map(|(&x, &o)| self.ln_q[x][o]).sum());
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return (0..scores.len()).collect();
        }
        let slack = 1e-9 * (1.0 + max.abs());
        let near: Vec<usize> = (0..scores.len()).filter(|&m| scores[m] >= max - slack).collect();
        if near.len() == 1 {
            return near;
        }
        let exact: Vec<Rational> = near
            .iter()
            .map(|&m| {
                self.code
                    .word(m)
                    .iter()
                    .zip(y)
                    .fold(Rational::one(), |acc, (&x, &o)| acc * self.pair.q(x, o))
            })
            .collect();
        let top = exact.iter().max().expect("nonempty").clone();
        near.into_iter().zip(exact).filter(|(_, v)| *v == top).map(|(m, _)| m).collect()
    }

    /// Runs `trials` trials of chunk `chunk` (at most [`CHUNK_TRIALS`]).
    pub fn run_chunk(&self, seed: u64, chunk: u64, trials: u64) -> Tally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let m_count = self.code.len();
        let mut tally = Tally::new(m_count);
        let mut y = vec![0; self.code.blocklength()];
        let mut scores = Vec::with_capacity(m_count);
        for _ in 0..trials {
            let m = rng.random_range(0..m_count);
            for (yi, &x) in y.iter_mut().zip(self.code.word(m)) {
                *yi = self.sample_output(x, &mut rng);
            }
            let best = self.best_set(&y, &mut scores);
            let error = if best.len() == 1 {
                best[0] != m
            } else {
                tally.ties += 1;
                match self.policy {
                    TiePolicy::Equiprobable => best[rng.random_range(0..best.len())] != m,
                    TiePolicy::AsError => true,
                    TiePolicy::GenieCorrect => !best.contains(&m),
                }
            };
            tally.trials += 1;
            tally.sent[m] += 1;
            if error {
                tally.errors += 1;
                tally.errors_by_message[m] += 1;
            }
        }
        tally
    }

    /// `(chunk index, trials)` for every chunk of a run.
    pub fn chunks(trials: u64) -> Vec<(u64, u64)> {
        let full = trials / CHUNK_TRIALS;
        let mut v: Vec<(u64, u64)> = (0..full).map(|c| (c, CHUNK_TRIALS)).collect();
        if trials % CHUNK_TRIALS > 0 {
            v.push((full, trials % CHUNK_TRIALS));
        }
        v
    }
}

/// Wilson score interval for `successes` out of `trials` at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Turns a merged tally into an outcome.
pub fn outcome_from_tally(tally: &Tally, seed: u64) -> DecodingOutcome {
    let interval = wilson_interval(tally.errors, tally.trials);
    let per_message = tally
        .sent
        .iter()
        .zip(&tally.errors_by_message)
        .map(|(&s, &e)| if s == 0 { 0.0 } else { e as f64 / s as f64 })
        .collect();
    DecodingOutcome {
        per_message,
        per_message_exact: None,
        average: tally.errors as f64 / tally.trials.max(1) as f64,
        average_exact: None,
        tie_mass: tally.ties as f64 / tally.trials.max(1) as f64,
        mode: DecodingMode::MonteCarlo {
            trials: tally.trials,
            seed,
            interval,
            half_width: 0.5 * (interval.1 - interval.0),
        },
    }
}

/// Simulates `trials` uses of the code with uniformly drawn messages.
pub fn monte_carlo_error(
    pair: &ChannelMetricPair,
    code: &Codebook,
    trials: u64,
    seed: u64,
    policy: TiePolicy,
) -> Result<DecodingOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let sim = Simulator::new(pair, code, policy)?;
    let mut tally = Tally::new(code.len());
    for (chunk, n) in Simulator::chunks(trials) {
        tally.merge(&sim.run_chunk(seed, chunk, n));
    }
    Ok(outcome_from_tally(&tally, seed))
}

/// `|X|^2 |Y| (1 + 2 ln(n+1) + ln(1/W_min))`.
pub fn delta_n(pair: &ChannelMetricPair, n: usize) -> f64 {
    let nx = pair.num_inputs() as f64;
    let ny = pair.num_outputs() as f64;
    let w_min = math::ln_rational(&pair.w_min());
    nx * nx * ny * (1.0 + 2.0 * ((n + 1) as f64).ln() - w_min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// Lower bound on the error probability of the first codeword.
    pub value: f64,
    pub s: ExtendedReal,
    pub mu: ExtendedReal,
    pub mu_prime: ExtendedReal,
    pub delta_n: f64,
    /// Set when the bound is the trivial value 0.
    pub trivial: bool,
}

/// `exp(-mu(s) + s mu'(s) - δ(n))`, valid when `mu'(s) < 0`.
pub fn theorem2_bound(pair: &ChannelMetricPair, x1: &[usize], x2: &[usize], s: f64) -> Result<BoundReport> {
    let kernel = PairKernel::new(pair);
    let mu = kernel.mu_sequence(x1, x2, s)?;
    let mu_prime = kernel.mu_sequence_prime(x1, x2, s)?;
    let d = mu_prime.to_f64();
    if !(d < 0.0) {
        return Err(Error::BoundHypothesis(d));
    }
    let delta = delta_n(pair, x1.len());
    let value = (-mu.to_f64() + s * d - delta).exp();
    Ok(BoundReport {
        value,
        s: s.into(),
        mu,
        mu_prime,
        delta_n: delta,
        trivial: false,
    })
}

/// `exp(-sup_s mu(s) - δ(n))` under equiprobable tie-breaking; `0` (flagged
/// trivial) when the supremum is infinite.
pub fn corollary2_bound(pair: &ChannelMetricPair, x1: &[usize], x2: &[usize]) -> Result<BoundReport> {
    let kernel = PairKernel::new(pair);
    let jt = joint_type(pair.num_inputs(), x1, x2)?;
    let sup = mu::sup_mixture(&kernel, &jt.cells())?;
    let delta = delta_n(pair, x1.len());
    let (value, trivial, mu_prime) = match sup.value.finite() {
        Some(v) => {
            let d = match sup.argsup.finite() {
                Some(s) => kernel.mu_sequence_prime(x1, x2, s)?,
                None => ExtendedReal::ZERO,
            };
            ((-v - delta).exp(), false, d)
        }
        None => (0.0, true, ExtendedReal::PosInfinity),
    };
    Ok(BoundReport {
        value,
        s: sup.argsup,
        mu: sup.value,
        mu_prime,
        delta_n: delta,
        trivial,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPoint {
    pub n: usize,
    pub pe1: f64,
    /// `-ln(P_{e,1}) / n`.
    pub exponent: f64,
    pub exact: bool,
}

/// `-ln P_{e,1} / n` for the codewords `a^n` and `b^n`, exactly when the
/// class budget allows and by simulation otherwise.
pub fn empirical_exponent(
    pair: &ChannelMetricPair,
    a: usize,
    b: usize,
    n_list: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<EmpiricalPoint>> {
    if a == b {
        return Err(Error::IdenticalLetters);
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let code = Codebook::new(pair.num_inputs(), vec![vec![a; n], vec![b; n]])?;
        let (pe1, exact) = match exact_error_probabilities(pair, &code, TiePolicy::Equiprobable, DEFAULT_CLASS_BUDGET) {
            Ok(o) => {
                let e = o.per_message_exact.expect("exact mode")[0].clone();
                (e, true)
            }
            Err(Error::BudgetExceeded { .. }) => {
                let o = monte_carlo_error(pair, &code, trials, seed, TiePolicy::Equiprobable)?;
                let pe = o.per_message[0];
                (Rational::from_float(pe).unwrap_or_else(Rational::zero), false)
            }
            Err(e) => return Err(e),
        };
        let ln = math::ln_rational(&pe1);
        out.push(EmpiricalPoint {
            n,
            pe1: math::to_f64(&pe1),
            exponent: -ln / n as f64,
            exact,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn code(words: Vec<Vec<usize>>, k: usize) -> Codebook {
        Codebook::new(k, words).unwrap()
    }

    #[test]
    fn constant_metric_gives_half() {
        let p = fixtures::constant_metric(vec![vec![ratio(1, 3), ratio(2, 3)], vec![ratio(1, 2), ratio(1, 2)]]);
        let o = exact_error_probabilities(&p, &code(vec![vec![0, 1], vec![1, 1]], 2), TiePolicy::Equiprobable, DEFAULT_CLASS_BUDGET).unwrap();
        assert_eq!(o.per_message_exact.unwrap(), vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(o.tie_mass, 1.0);
    }

    #[test]
    fn bsc_single_letter() {
        let p = fixtures::bsc(ratio(1, 4));
        let o = exact_error_probabilities(&p, &code(vec![vec![0], vec![1]], 2), TiePolicy::Equiprobable, DEFAULT_CLASS_BUDGET).unwrap();
        assert_eq!(o.per_message_exact.unwrap()[0], ratio(1, 4));
        assert_eq!(o.average_exact.unwrap(), ratio(1, 4));
    }

    #[test]
    fn example_one_single_letter() {
        let p = fixtures::typewriter(ratio(1, 10));
        let o = exact_error_probabilities(&p, &code(vec![vec![0], vec![1]], 3), TiePolicy::Equiprobable, DEFAULT_CLASS_BUDGET).unwrap();
        assert_eq!(o.per_message_exact.unwrap()[0], ratio(1, 10));
    }

    #[test]
    fn budget_is_enforced() {
        let p = fixtures::bsc(ratio(1, 4));
        let c = code(vec![vec![0; 20], vec![1; 20]], 2);
        assert_eq!(
            exact_error_probabilities(&p, &c, TiePolicy::Equiprobable, 5),
            Err(Error::BudgetExceeded { classes: 21, budget: 5 })
        );
    }

    #[test]
    fn monte_carlo_deterministic_channel() {
        let p = fixtures::noiseless(2);
        let o = monte_carlo_error(&p, &code(vec![vec![0, 0], vec![1, 1]], 2), 1000, 7, TiePolicy::Equiprobable).unwrap();
        assert_eq!(o.average, 0.0);
    }

    #[test]
    fn monte_carlo_reproducible_and_close() {
        let p = fixtures::bsc(ratio(1, 4));
        let c = code(vec![vec![0], vec![1]], 2);
        let a = monte_carlo_error(&p, &c, 100_000, 3, TiePolicy::Equiprobable).unwrap();
        let b = monte_carlo_error(&p, &c, 100_000, 3, TiePolicy::Equiprobable).unwrap();
        assert_eq!(a, b);
        let DecodingMode::MonteCarlo { interval, .. } = a.mode else { panic!() };
        assert!(interval.0 <= 0.25 && 0.25 <= interval.1, "{interval:?}");
    }

    #[test]
    fn wilson_known_value() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831_6).abs() < 1e-6 && (hi - 0.596_168_4).abs() < 1e-6);
    }

    #[test]
    fn theorem2_gate_and_value() {
        let p = fixtures::bsc(ratio(1, 4));
        let r = theorem2_bound(&p, &[0], &[1], 0.9).unwrap();
        assert!(r.value > 0.0 && r.value <= 0.25);
        assert!(matches!(theorem2_bound(&p, &[0], &[1], 0.1), Err(Error::BoundHypothesis(_))));
        let c = corollary2_bound(&p, &[0], &[1]).unwrap();
        assert!((c.value - (-0.143_841_036_225_890_2 - delta_n(&p, 1)).exp()).abs() < 1e-25);
    }

    #[test]
    fn corollary2_trivial_on_empty_support() {
        let w = vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)]];
        let p = ChannelMetricPair::from_matrices(w.clone(), w).unwrap();
        let r = corollary2_bound(&p, &[0], &[1]).unwrap();
        assert!(r.trivial);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn empirical_rejects_same_letter() {
        let p = fixtures::bsc(ratio(1, 4));
        assert_eq!(empirical_exponent(&p, 1, 1, &[2], 10, 0), Err(Error::IdenticalLetters));
    }
}
