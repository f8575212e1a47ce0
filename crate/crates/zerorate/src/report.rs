//! Result documents. Every command wraps its payload in a [`CommandResult`].

use serde::Serialize;
use serde_json::Value;
use zerorate_core::codebook::{ChainReport, SubcodeCertificate};
use zerorate_core::decoder::{BoundReport, DecodingMode, DecodingOutcome, EmpiricalPoint};
use zerorate_core::exponent::{ExponentKind, ExponentResult, MethodTrace};
use zerorate_core::rational::format_rational;
use zerorate_core::zero_error::{BalanceReport, ZeroErrorReport};
use zerorate_core::{ChannelMetricPair, ExtendedReal};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CommandResult {
    pub command: String,
    pub version: String,
    /// SHA-256 over the command, its input files and its result-affecting flags.
    pub input_digest: String,
    pub elapsed_ms: u64,
    pub payload: Value,
}

/// Presentation unit; values are computed in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Nats,
    Bits,
}

impl Unit {
    pub fn scale(self, v: f64) -> f64 {
        match self {
            Unit::Nats => v,
            Unit::Bits => v / std::f64::consts::LN_2,
        }
    }

    pub fn scale_ext(self, v: ExtendedReal) -> Value {
        ext(match v {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(self.scale(x)),
            other => other,
        })
    }
}

/// Finite values as numbers, infinities as the strings `"inf"` and `"-inf"`.
pub fn ext(v: ExtendedReal) -> Value {
    match v {
        ExtendedReal::Finite(x) => num(x),
        ExtendedReal::PosInfinity => Value::String("inf".into()),
        ExtendedReal::NegInfinity => Value::String("-inf".into()),
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

#[derive(Serialize)]
struct YHat {
    a: usize,
    b: usize,
    outputs: Vec<usize>,
}

pub fn validate(pair: &ChannelMetricPair) -> Value {
    #[derive(Serialize)]
    struct Doc<'a> {
        name: Option<&'a str>,
        input_alphabet: &'a [String],
        output_alphabet: &'a [String],
        num_inputs: usize,
        num_outputs: usize,
        w_min: String,
        strict_support_match: bool,
        y_hat: Vec<YHat>,
        disjoint_pairs: Vec<[usize; 2]>,
    }
    let sets = pair.support_sets();
    let n = pair.num_inputs();
    to_value(&Doc {
        name: pair.name(),
        input_alphabet: pair.input_alphabet(),
        output_alphabet: pair.output_alphabet(),
        num_inputs: n,
        num_outputs: pair.num_outputs(),
        w_min: format_rational(&sets.w_min),
        strict_support_match: zerorate_core::zero_error::is_strict_support_match(pair),
        y_hat: (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| YHat {
                a,
                b,
                outputs: sets.y_hat(a, b).iter().copied().collect(),
            })
            .collect(),
        disjoint_pairs: sets.disjoint_pairs.iter().map(|&(a, b)| [a, b]).collect(),
    })
}

/// Shared by `zero-error` and `balanced`.
pub fn zero_error(z: &ZeroErrorReport, b: &BalanceReport) -> Value {
    #[derive(Serialize)]
    struct WitnessDoc {
        a: usize,
        b: usize,
        min_side: String,
        max_side: String,
        overlap: Option<bool>,
    }
    #[derive(Serialize)]
    struct ViolationDoc {
        a: usize,
        b: usize,
        y1: usize,
        ratio1: String,
        y2: usize,
        ratio2: String,
    }
    #[derive(Serialize)]
    struct Doc {
        c0bar_zero: bool,
        c0_zero: bool,
        balanced: bool,
        boundary_pairs: Vec<[usize; 2]>,
        witness: Option<WitnessDoc>,
        violation: Option<ViolationDoc>,
    }
    to_value(&Doc {
        c0bar_zero: z.c0bar_zero,
        c0_zero: z.c0_zero,
        balanced: b.balanced,
        boundary_pairs: z.boundary_set.iter().map(|&(a, b)| [a, b]).collect(),
        witness: z.witness.as_ref().map(|w| WitnessDoc {
            a: w.a,
            b: w.b,
            min_side: w.ratios.min_side.to_string(),
            max_side: w.ratios.max_side.to_string(),
            overlap: w.overlap,
        }),
        violation: b.violation.as_ref().map(|v| ViolationDoc {
            a: v.a,
            b: v.b,
            y1: v.y1,
            ratio1: format_rational(&v.ratio1),
            y2: v.y2,
            ratio2: format_rational(&v.ratio2),
        }),
    })
}

pub fn method_trace(t: &MethodTrace) -> Value {
    let stages: Vec<Value> = t
        .stages
        .iter()
        .map(|s| serde_json::json!({"stage": s.stage, "s": ext(s.s), "objective": num(s.objective)}))
        .collect();
    serde_json::json!({
        "method": t.method.name(),
        "restarts": t.restarts,
        "grid_resolution": t.grid_resolution,
        "s_grid_points": t.s_grid_points,
        "q_solves": t.q_solves,
        "alternations": t.alternations,
        "stages": stages,
        "notes": t.notes,
    })
}

pub fn exponent(r: &ExponentResult, unit: Unit, curve: Option<&str>) -> Value {
    serde_json::json!({
        "unit": unit,
        "value": num(unit.scale(r.value)),
        "kind": match r.kind {
            ExponentKind::ExactEquality => "exact_equality",
            ExponentKind::UpperBound => "upper_bound",
        },
        "balanced": r.balanced,
        "q_star": r.q_star.probs(),
        "s_star": num(r.s_star),
        "s_cap": num(r.s_cap),
        "lower_expurgated": num(unit.scale(r.lower_expurgated)),
        "gap_bound": num(unit.scale(r.gap_bound)),
        "curve": curve,
        "method_trace": method_trace(&r.method_trace),
    })
}

pub fn certificate(c: &SubcodeCertificate) -> Value {
    serde_json::json!({
        "indices": c.indices,
        "t": c.t,
        "m_hat": c.m_hat,
        "target": c.target,
        "target_reached": c.target_reached,
        "exact_search": c.exact_search,
        "delta_bound": num(c.delta_bound),
        "spread": num(c.spread),
        "asymmetry": num(c.asymmetry),
        "observed_delta": num(c.observed_delta),
        "komlos_bound": num(c.komlos_bound),
        "komlos_holds": c.asymmetry <= c.komlos_bound,
    })
}

pub fn chain(c: &ChainReport, unit: Unit) -> Value {
    let lines: Vec<Value> = c
        .lines
        .iter()
        .map(|l| serde_json::json!({"label": l.label, "value": num(unit.scale(l.value))}))
        .collect();
    let slacks: Vec<Value> = c.slacks.iter().map(|&s| num(unit.scale(s))).collect();
    serde_json::json!({
        "lines": lines,
        "slacks": slacks,
        "holds": c.holds,
        "anchor": [c.anchor.0, c.anchor.1],
        "s_bar_anchor": num(c.s_bar_anchor),
        "s_bar_max": num(c.s_bar_max),
        "s_cap": num(c.s_cap),
        "k": num(c.k),
        "delta_nominal": num(c.delta_nominal),
        "delta_observed": num(c.delta_observed),
        "delta_used": num(c.delta_used),
        "closeness": num(unit.scale(c.closeness)),
        "closeness_bound": num(unit.scale(c.closeness_bound)),
    })
}

pub fn outcome(o: &DecodingOutcome, ties: &str) -> Value {
    let mut v = serde_json::json!({
        "ties": ties,
        "per_message": o.per_message,
        "average": num(o.average),
        "tie_mass": num(o.tie_mass),
    });
    let obj = v.as_object_mut().expect("object literal");
    match &o.mode {
        DecodingMode::Exact => {
            obj.insert("mode".into(), "exact".into());
            let exact = o.per_message_exact.as_ref().map(|e| e.iter().map(format_rational).collect::<Vec<_>>());
            obj.insert("per_message_exact".into(), to_value(&exact));
            obj.insert("average_exact".into(), to_value(&o.average_exact.as_ref().map(format_rational)));
        }
        DecodingMode::MonteCarlo {
            trials,
            seed,
            interval,
            half_width,
        } => {
            obj.insert("mode".into(), "monte_carlo".into());
            obj.insert("trials".into(), (*trials).into());
            obj.insert("seed".into(), (*seed).into());
            obj.insert("interval".into(), serde_json::json!([num(interval.0), num(interval.1)]));
            obj.insert("half_width".into(), num(*half_width));
        }
    }
    v
}

pub fn bound(b: &BoundReport, unit: Unit) -> Value {
    serde_json::json!({
        "value": num(b.value),
        "s": ext(b.s),
        "mu": unit.scale_ext(b.mu),
        "mu_prime": unit.scale_ext(b.mu_prime),
        "delta_n": num(unit.scale(b.delta_n)),
        "trivial": b.trivial,
    })
}

pub fn empirical(points: &[EmpiricalPoint], unit: Unit) -> Vec<Value> {
    points
        .iter()
        .map(|p| {
            serde_json::json!({
                "n": p.n,
                "pe1": num(p.pe1),
                "exponent": num(unit.scale(p.exponent)),
                "exact": p.exact,
            })
        })
        .collect()
}
