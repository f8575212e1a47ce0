//! The zero-rate exponent: expurgated lower value, exact value for balanced
//! pairs, and the asymptote relaxation with its gap certificate otherwise.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::channel::{ChannelMetricPair, InputDistribution};
use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::ext::ExtendedReal;
use crate::math;
use crate::mu::{self, Asymptote, MuFamily, PairKernel};
use crate::rational::Rational;
use crate::simplex::{self, PgOptions, QpSolution, SymMatrix};
use crate::zero_error::{self, ExtremalRatios};

/// Asymptote data for a boundary pair `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HatEntry {
    /// `A(a,b) = min_{W(y|a) > 0} q(a,y)/q(b,y)`.
    pub a_ratio: Rational,
    /// Outputs of `Ŷ_{a,b}` attaining `A(a,b)`.
    pub attaining: BTreeSet<usize>,
    /// `W(·|a)` mass on `attaining`.
    pub mass: Rational,
    ln_a: f64,
    offset: f64,
}

/// The kernel with every boundary pair's `mu` replaced by its asymptote
/// `s ln A(a,b) - ln W(Ŷ^A|a)`, which dominates it.
#[derive(Debug, Clone)]
pub struct HattedKernel<'k> {
    raw: &'k PairKernel,
    nx: usize,
    hats: Vec<Option<HatEntry>>,
    boundary: Vec<(usize, usize)>,
}

impl<'k> HattedKernel<'k> {
    pub fn new(pair: &ChannelMetricPair, raw: &'k PairKernel) -> Result<Self> {
        let (ok, witness) = zero_error::check_c0bar_zero(pair);
        if !ok {
            let w = witness.expect("a failed check carries a witness");
            return Err(Error::InfiniteExponent { a: w.a, b: w.b });
        }
        let nx = pair.num_inputs();
        let boundary = zero_error::boundary_set(pair);
        let mut hats = vec![None; nx * nx];
        for &(a, b) in &boundary {
            let a_ratio = ExtremalRatios::of(pair, a, b)
                .min_side
                .finite()
                .cloned()
                .ok_or_else(|| Error::Internal("boundary pair with infinite ratio".into()))?;
            let attaining: BTreeSet<usize> = pair
                .common_metric_support(a, b)
                .into_iter()
                .filter(|&y| pair.q(a, y) / pair.q(b, y) == a_ratio)
                .collect();
            let mass: Rational = attaining.iter().map(|&y| pair.w(a, y)).sum();
            let consistent = raw
                .asymptote(a, b)
                .is_some_and(|x| x.ratio == Rational::one() / &a_ratio && x.mass == mass);
            if !consistent || mass.is_zero() {
                return Err(Error::Internal("boundary set disagrees with the kernel asymptotes".into()));
            }
            hats[a * nx + b] = Some(HatEntry {
                ln_a: math::ln_rational(&a_ratio),
                offset: -math::ln_rational(&mass),
                a_ratio,
                attaining,
                mass,
            });
        }
        Ok(HattedKernel {
            raw,
            nx,
            hats,
            boundary,
        })
    }

    pub fn entry(&self, a: usize, b: usize) -> Option<&HatEntry> {
        self.hats[a * self.nx + b].as_ref()
    }

    pub fn boundary(&self) -> &[(usize, usize)] {
        &self.boundary
    }

    pub fn raw(&self) -> &PairKernel {
        self.raw
    }
}

impl MuFamily for HattedKernel<'_> {
    fn num_inputs(&self) -> usize {
        self.nx
    }

    fn value(&self, a: usize, b: usize, s: f64) -> f64 {
        match self.entry(a, b) {
            Some(h) => s * h.ln_a + h.offset,
            None => self.raw.value(a, b, s),
        }
    }

    fn slope(&self, a: usize, b: usize, s: f64) -> f64 {
        match self.entry(a, b) {
            Some(h) => h.ln_a,
            None => self.raw.slope(a, b, s),
        }
    }

    fn asymptote(&self, a: usize, b: usize) -> Option<Asymptote> {
        match self.entry(a, b) {
            Some(h) => Some(Asymptote {
                ratio: Rational::one() / &h.a_ratio,
                mass: h.mass.clone(),
                offset: h.offset,
                affine: true,
            }),
            None => self.raw.asymptote(a, b),
        }
    }
}

/// `½ max_{(a,b) in B} [ln(W(Ŷ|a)/W(Ŷ^A|a)) + ln(W(Ŷ|b)/W(Ŷ^A|b))]`, the
/// largest possible distance between the relaxed value and the expurgated
/// value.
pub fn gap_bound(pair: &ChannelMetricPair) -> Result<f64> {
    let kernel = PairKernel::new(pair);
    let hatted = HattedKernel::new(pair, &kernel)?;
    let mut best = 0.0f64;
    for &(a, b) in hatted.boundary() {
        let attaining = &hatted.entry(a, b).expect("boundary entry").attaining;
        let y_hat = pair.common_metric_support(a, b);
        let mut term = 0.0;
        for x in [a, b] {
            let all: Rational = y_hat.iter().map(|&y| pair.w(x, y)).sum();
            let part: Rational = attaining.iter().map(|&y| pair.w(x, y)).sum();
            term += math::ln_rational(&(all / part));
        }
        best = best.max(term);
    }
    Ok(0.5 * best)
}

/// The symmetrized matrix `σ_{a,b}(s) = mu_{a,b}(s) + mu_{b,a}(s)`.
pub fn sigma_matrix<F: MuFamily + ?Sized>(family: &F, s: f64) -> SymMatrix {
    SymMatrix::from_fn(family.num_inputs(), |a, b| family.value(a, b, s) + family.value(b, a, s))
}

/// `sum_{a,b} Q(a) Q(b) mu_{a,b}(s)`, computed as `½ QᵀσQ`.
pub fn objective<F: MuFamily + ?Sized>(family: &F, q: &InputDistribution, s: f64) -> Result<ExtendedReal> {
    if !(s >= 0.0) {
        return Err(Error::NegativeS(s));
    }
    if q.len() != family.num_inputs() {
        return Err(Error::LengthMismatch(q.len(), family.num_inputs()));
    }
    Ok(sigma_matrix(family, s).form(q.probs()).into())
}

/// Optimizer for the inner maximization over input distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QMethod {
    /// Exhaustive simplex grid; at most four inputs.
    Grid,
    /// Multistart projected gradient.
    MultistartPg,
    /// Best distribution supported on two inputs.
    TwoPoint,
    /// Projected gradient.
    #[default]
    Auto,
}

impl QMethod {
    pub fn name(self) -> &'static str {
        match self {
            QMethod::Grid => "grid",
            QMethod::MultistartPg => "multistart_pg",
            QMethod::TwoPoint => "two_point",
            QMethod::Auto => "auto",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentOptions {
    pub method: QMethod,
    /// Upper end of the geometric `s` grid for the expurgated value.
    pub s_max: f64,
    /// Points of that grid, `s = 0` included.
    pub s_grid_points: usize,
    /// Points of the uniform grid on `[0, ŝ]` used for the exponent itself.
    pub cap_grid_points: usize,
    /// Grid denominator for [`QMethod::Grid`].
    pub grid_resolution: u32,
    /// Absolute tolerance on objective improvements.
    pub tol: f64,
    /// Projected-gradient starting points.
    pub starts: usize,
    pub seed: u64,
    pub max_alternations: usize,
}

impl Default for ExponentOptions {
    fn default() -> Self {
        ExponentOptions {
            method: QMethod::Auto,
            s_max: 64.0,
            s_grid_points: 512,
            cap_grid_points: 64,
            grid_resolution: 200,
            tol: 1e-10,
            starts: 32,
            seed: 0,
            max_alternations: 50,
        }
    }
}

/// One step of the search, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStage {
    pub stage: &'static str,
    pub s: ExtendedReal,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MethodTrace {
    pub method: QMethod,
    /// Starting points per projected-gradient solve.
    pub restarts: usize,
    pub grid_resolution: Option<u32>,
    pub s_grid_points: usize,
    pub q_solves: usize,
    pub alternations: usize,
    pub stages: Vec<TraceStage>,
    pub notes: Vec<String>,
}

/// Maximizes the objective over input distributions at fixed `s`.
pub fn maximize_over_q<F: MuFamily + ?Sized>(
    family: &F,
    s: f64,
    method: QMethod,
    opts: &ExponentOptions,
) -> Result<(InputDistribution, f64)> {
    if !(s >= 0.0) {
        return Err(Error::NegativeS(s));
    }
    let mut trace = MethodTrace::default();
    let m = sigma_matrix(family, s);
    if let Some((a, b)) = infinite_entry(&m) {
        return Err(Error::InfiniteExponent { a, b });
    }
    let sol = solve_q(&m, method, opts, &[], &mut trace);
    Ok((InputDistribution::from_simplex_point(sol.q), sol.value))
}

fn infinite_entry(m: &SymMatrix) -> Option<(usize, usize)> {
    let n = m.dim();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| m.get(a, b) == f64::INFINITY)
}

fn solve_q(m: &SymMatrix, method: QMethod, opts: &ExponentOptions, warm: &[Vec<f64>], trace: &mut MethodTrace) -> QpSolution {
    trace.q_solves += 1;
    let pg = PgOptions {
        starts: opts.starts,
        tol: opts.tol,
        seed: opts.seed,
        ..PgOptions::default()
    };
    match method {
        QMethod::Grid if m.dim() <= 4 => simplex::maximize_grid(m, opts.grid_resolution),
        QMethod::TwoPoint => simplex::maximize_two_point(m),
        _ => simplex::maximize_pg(m, &pg, warm),
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    q: Vec<f64>,
    s: f64,
    value: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.value > other.value
            || (self.value == other.value && (self.s < other.s || (self.s == other.s && self.q < other.q)))
    }
}

struct Search<'a, F: MuFamily + ?Sized> {
    family: &'a F,
    opts: &'a ExponentOptions,
    method: QMethod,
    trace: MethodTrace,
}

impl<'a, F: MuFamily + ?Sized> Search<'a, F> {
    fn new(family: &'a F, opts: &'a ExponentOptions) -> Self {
        let method = if opts.method == QMethod::Grid && family.num_inputs() > 4 {
            QMethod::Auto
        } else {
            opts.method
        };
        let mut trace = MethodTrace {
            method: opts.method,
            restarts: opts.starts,
            grid_resolution: (method == QMethod::Grid).then_some(opts.grid_resolution),
            ..MethodTrace::default()
        };
        if method != opts.method {
            trace.notes.push("grid search needs at most four inputs; used projected gradient".into());
        }
        Search {
            family,
            opts,
            method,
            trace,
        }
    }

    fn at(&mut self, s: f64, warm: &[Vec<f64>]) -> Candidate {
        let m = sigma_matrix(self.family, s);
        let sol = solve_q(&m, self.method, self.opts, warm, &mut self.trace);
        Candidate {
            q: sol.q,
            s,
            value: sol.value,
        }
    }

    fn fixed_q_value(&self, q: &[f64], s: f64) -> f64 {
        sigma_matrix(self.family, s).form(q)
    }

    fn fixed_q_slope(&self, q: &[f64], s: f64) -> f64 {
        let n = self.family.num_inputs();
        let mut d = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                if q[a] > 0.0 && q[b] > 0.0 {
                    d += q[a] * q[b] * (self.family.slope(a, b, s) + self.family.slope(b, a, s));
                }
            }
        }
        d
    }

    /// Grid scan, golden-section refinement of the best bracket, then
    /// alternating maximization in `s` and `Q` on `[0, s_upper]`.
    fn run(&mut self, s_points: &[f64], s_upper: f64) -> Candidate {
        self.trace.s_grid_points += s_points.len();
        let mut best: Option<(usize, Candidate)> = None;
        let mut warm: Vec<Vec<f64>> = Vec::new();
        for (i, &s) in s_points.iter().enumerate() {
            let c = self.at(s, &warm);
            warm = vec![c.q.clone()];
            if best.as_ref().is_none_or(|(_, b)| c.beats(b)) {
                best = Some((i, c));
            }
        }
        let (k, mut best) = best.expect("at least one s point");
        self.trace.stages.push(TraceStage {
            stage: "s_grid",
            s: best.s.into(),
            objective: best.value,
        });

        let lo = if k > 0 { s_points[k - 1] } else { s_points[k] };
        let hi = if k + 1 < s_points.len() { s_points[k + 1] } else { s_points[k] };
        if hi > lo {
            let c = self.golden(lo, hi, &best.q);
            if c.beats(&best) {
                best = c;
            }
        }
        self.trace.stages.push(TraceStage {
            stage: "golden_section",
            s: best.s.into(),
            objective: best.value,
        });

        for _ in 0..self.opts.max_alternations {
            self.trace.alternations += 1;
            let s = self.best_s_for(&best.q, s_upper);
            let c = self.at(s, &[best.q.clone()]);
            let gain = c.value - best.value;
            if c.beats(&best) {
                best = c;
            }
            if gain <= self.opts.tol {
                break;
            }
        }
        self.trace.stages.push(TraceStage {
            stage: "alternation",
            s: best.s.into(),
            objective: best.value,
        });
        best
    }

    fn golden(&mut self, mut lo: f64, mut hi: f64, q0: &[f64]) -> Candidate {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let warm = vec![q0.to_vec()];
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut c1 = self.at(x1, &warm);
        let mut c2 = self.at(x2, &warm);
        for _ in 0..60 {
            if hi - lo <= mu::S_TOLERANCE {
                break;
            }
            if c1.value >= c2.value {
                hi = x2;
                x2 = x1;
                c2 = c1;
                x1 = hi - INV_PHI * (hi - lo);
                c1 = self.at(x1, &warm);
            } else {
                lo = x1;
                x1 = x2;
                c1 = c2;
                x2 = lo + INV_PHI * (hi - lo);
                c2 = self.at(x2, &warm);
            }
        }
        if c2.beats(&c1) {
            c2
        } else {
            c1
        }
    }

    /// Smallest maximizer of the concave map `s -> ½ QᵀσQ` on `[0, s_upper]`.
    fn best_s_for(&self, q: &[f64], s_upper: f64) -> f64 {
        let d = |s| self.fixed_q_slope(q, s);
        if d(0.0) <= 0.0 {
            return 0.0;
        }
        if d(s_upper) >= 0.0 {
            return s_upper;
        }
        let s = mu::bisect_sign(d, 0.0, s_upper).unwrap_or(s_upper);
        // Guard against a flat top: prefer the endpoint if it is no worse.
        if self.fixed_q_value(q, s_upper) > self.fixed_q_value(q, s) {
            s_upper
        } else {
            s
        }
    }
}

/// Kind of value reported by [`zero_rate_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentKind {
    ExactEquality,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentResult {
    /// Nats per channel use.
    pub value: f64,
    pub q_star: InputDistribution,
    pub s_star: f64,
    pub balanced: bool,
    pub kind: ExponentKind,
    pub lower_expurgated: f64,
    pub gap_bound: f64,
    /// `ŝ` of the family that was searched.
    pub s_cap: f64,
    pub method_trace: MethodTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpurgatedResult {
    pub value: f64,
    pub q_star: InputDistribution,
    /// `+inf` when the best value is the limit as `s -> infinity`.
    pub s_star: ExtendedReal,
    pub method_trace: MethodTrace,
}

fn require_c0bar_zero(pair: &ChannelMetricPair) -> Result<()> {
    match zero_error::check_c0bar_zero(pair) {
        (true, _) => Ok(()),
        (false, w) => {
            let w = w.expect("a failed check carries a witness");
            Err(Error::InfiniteExponent { a: w.a, b: w.b })
        }
    }
}

fn uniform_points(hi: f64, count: usize) -> Vec<f64> {
    if hi <= 0.0 || count < 2 {
        return vec![0.0];
    }
    (0..count).map(|i| hi * i as f64 / (count - 1) as f64).collect()
}

/// `0` followed by `count - 1` geometrically spaced points ending at `hi`.
pub fn geometric_points(hi: f64, count: usize) -> Vec<f64> {
    let mut pts = vec![0.0];
    if count < 2 || hi <= 0.0 {
        return pts;
    }
    let lo = (hi * 1e-5).min(1e-3);
    let k = count - 1;
    for i in 0..k {
        let t = if k == 1 { 1.0 } else { i as f64 / (k - 1) as f64 };
        pts.push(lo * (hi / lo).powf(t));
    }
    pts
}

/// The expurgated value `max_Q sup_s sum Q(a)Q(b) mu_{a,b}(s)` with the raw
/// kernel, including the limit `s -> infinity`.
pub fn expurgated_lower(pair: &ChannelMetricPair, opts: &ExponentOptions) -> Result<ExpurgatedResult> {
    require_c0bar_zero(pair)?;
    let kernel = PairKernel::new(pair);
    let nx = pair.num_inputs();
    if nx == 1 {
        return Ok(ExpurgatedResult {
            value: 0.0,
            q_star: InputDistribution::point_mass(1, 0),
            s_star: ExtendedReal::ZERO,
            method_trace: MethodTrace::default(),
        });
    }
    let mut points = geometric_points(opts.s_max, opts.s_grid_points);
    let mut s_upper = opts.s_max;
    if let Ok(cap) = mu::s_cap(&kernel) {
        if cap > s_upper {
            points.push(cap);
            s_upper = cap;
        }
    }
    let mut search = Search::new(&kernel, opts);
    let best = search.run(&points, s_upper);
    let mut trace = search.trace;

    let tail = limit_value(&kernel, opts, &mut trace)?;
    trace.stages.push(TraceStage {
        stage: "limit",
        s: ExtendedReal::PosInfinity,
        objective: tail.value,
    });
    let (value, q, s_star) = if tail.value > best.value {
        (tail.value, tail.q, ExtendedReal::PosInfinity)
    } else {
        (best.value, best.q, best.s.into())
    };
    Ok(ExpurgatedResult {
        value,
        q_star: InputDistribution::from_simplex_point(q),
        s_star,
        method_trace: trace,
    })
}

/// `max_Q lim_{s -> inf} ½ QᵀσQ`: only distributions supported on cliques of
/// pairs whose `σ` has a finite limit keep a finite value.
fn limit_value(kernel: &PairKernel, opts: &ExponentOptions, trace: &mut MethodTrace) -> Result<QpSolution> {
    let nx = kernel.num_inputs();
    let mut limit = vec![f64::NEG_INFINITY; nx * nx];
    for a in 0..nx {
        for b in a + 1..nx {
            let (Some(x), Some(y)) = (kernel.asymptote(a, b), kernel.asymptote(b, a)) else {
                return Err(Error::InfiniteExponent { a, b });
            };
            match (x.ratio * y.ratio).cmp(&Rational::one()) {
                core::cmp::Ordering::Less => return Err(Error::InfiniteExponent { a, b }),
                core::cmp::Ordering::Equal => {
                    limit[a * nx + b] = x.offset + y.offset;
                }
                core::cmp::Ordering::Greater => {}
            }
        }
    }
    let graph = Graph::from_fn(nx, |a, b| limit[a * nx + b].is_finite());
    let full = SymMatrix::from_fn(nx, |a, b| limit[a.min(b) * nx + a.max(b)]);
    let mut best = QpSolution {
        q: InputDistribution::point_mass(nx, 0).probs().to_vec(),
        value: 0.0,
        evaluations: 0,
    };
    for clique in graph.maximal_cliques() {
        if clique.len() < 2 {
            continue;
        }
        let sub = full.restrict(&clique);
        let sol = solve_q(&sub, opts.method, opts, &[], trace);
        if sol.value > best.value {
            let mut q = vec![0.0; nx];
            for (i, &c) in clique.iter().enumerate() {
                q[c] = sol.q[i];
            }
            best = QpSolution {
                q,
                value: sol.value,
                evaluations: sol.evaluations,
            };
        }
    }
    Ok(best)
}

/// `sup_s max_Q sum Q(a)Q(b) mu_{a,b}(s)` for a family with finite `ŝ`,
/// searched on `[0, ŝ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOptimum {
    pub value: f64,
    pub q_star: InputDistribution,
    pub s_star: f64,
    pub s_cap: f64,
    pub method_trace: MethodTrace,
}

pub fn family_exponent<F: MuFamily + ?Sized>(family: &F, opts: &ExponentOptions) -> Result<FamilyOptimum> {
    let cap = mu::s_cap(family)?;
    let mut search = Search::new(family, opts);
    let best = search.run(&uniform_points(cap, opts.cap_grid_points), cap);
    Ok(FamilyOptimum {
        value: best.value,
        q_star: InputDistribution::from_simplex_point(best.q),
        s_star: best.s,
        s_cap: cap,
        method_trace: search.trace,
    })
}

/// The zero-rate exponent for balanced pairs, and the relaxed upper bound
/// (with the expurgated value and gap certificate attached) otherwise.
pub fn zero_rate_exponent(pair: &ChannelMetricPair, opts: &ExponentOptions) -> Result<ExponentResult> {
    require_c0bar_zero(pair)?;
    let kernel = PairKernel::new(pair);
    let balanced = zero_error::is_balanced(pair).balanced;
    let gap = if balanced { 0.0 } else { gap_bound(pair)? };
    let lower = expurgated_lower(pair, opts)?;
    let kind = if balanced {
        ExponentKind::ExactEquality
    } else {
        ExponentKind::UpperBound
    };
    if pair.num_inputs() == 1 {
        return Ok(ExponentResult {
            value: 0.0,
            q_star: InputDistribution::point_mass(1, 0),
            s_star: 0.0,
            balanced,
            kind,
            lower_expurgated: lower.value,
            gap_bound: gap,
            s_cap: 0.0,
            method_trace: MethodTrace::default(),
        });
    }

    let best = if balanced {
        family_exponent(&kernel, opts)?
    } else {
        family_exponent(&HattedKernel::new(pair, &kernel)?, opts)?
    };
    Ok(ExponentResult {
        value: best.value,
        q_star: best.q_star,
        s_star: best.s_star,
        balanced,
        kind,
        lower_expurgated: lower.value,
        gap_bound: gap,
        s_cap: best.s_cap,
        method_trace: best.method_trace,
    })
}

/// `(s, max_Q objective)` along `s_points`, with the raw kernel or, when
/// `hatted` is set, its relaxation.
pub fn objective_curve(
    pair: &ChannelMetricPair,
    s_points: &[f64],
    hatted: bool,
    opts: &ExponentOptions,
) -> Result<Vec<(f64, f64)>> {
    require_c0bar_zero(pair)?;
    let kernel = PairKernel::new(pair);
    let hat = if hatted {
        Some(HattedKernel::new(pair, &kernel)?)
    } else {
        None
    };
    let family: &dyn MuFamily = match &hat {
        Some(h) => h,
        None => &kernel,
    };
    s_points
        .iter()
        .map(|&s| maximize_over_q(family, s, opts.method, opts).map(|(_, v)| (s, v)))
        .collect()
}
