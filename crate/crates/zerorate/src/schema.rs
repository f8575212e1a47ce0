//! JSON Schemas for result documents, one per command.

use serde_json::{json, Value};

pub const COMMANDS: [&str; 12] = [
    "validate",
    "zero-error",
    "balanced",
    "exponent",
    "gap",
    "mu-curve",
    "dmin",
    "komlos",
    "certificate",
    "exact-pe",
    "simulate",
    "empirical",
];

fn ext_number() -> Value {
    json!({"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf"]}]})
}

fn rational() -> Value {
    json!({"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"})
}

fn index() -> Value {
    json!({"type": "integer", "minimum": 0})
}

fn index_pair() -> Value {
    json!({"type": "array", "items": index(), "minItems": 2, "maxItems": 2})
}

fn probability() -> Value {
    json!({"type": "number", "minimum": 0, "maximum": 1})
}

fn unit() -> Value {
    json!({"enum": ["nats", "bits"]})
}

fn object(props: Value) -> Value {
    let required: Vec<String> = props
        .as_object()
        .expect("properties are an object")
        .keys()
        .cloned()
        .collect();
    json!({"type": "object", "properties": props, "required": required})
}

fn nullable(v: Value) -> Value {
    json!({"oneOf": [{"type": "null"}, v]})
}

fn zero_error() -> Value {
    object(json!({
        "c0bar_zero": {"type": "boolean"},
        "c0_zero": {"type": "boolean"},
        "balanced": {"type": "boolean"},
        "boundary_pairs": {"type": "array", "items": index_pair()},
        "witness": nullable(object(json!({
            "a": index(), "b": index(),
            "min_side": {"type": "string"}, "max_side": {"type": "string"},
            "overlap": {"type": ["boolean", "null"]},
        }))),
        "violation": nullable(object(json!({
            "a": index(), "b": index(),
            "y1": index(), "ratio1": rational(),
            "y2": index(), "ratio2": rational(),
        }))),
    }))
}

fn certificate() -> Value {
    object(json!({
        "indices": {"type": "array", "items": index(), "minItems": 2},
        "t": {"type": "integer", "minimum": 1},
        "m_hat": {"type": "integer", "minimum": 2},
        "target": {"type": "integer", "minimum": 2},
        "target_reached": {"type": "boolean"},
        "exact_search": {"type": "boolean"},
        "delta_bound": {"type": "number"},
        "spread": {"type": "number", "minimum": 0},
        "asymmetry": {"type": "number", "minimum": 0},
        "observed_delta": {"type": "number", "minimum": 0},
        "komlos_bound": {"type": "number"},
        "komlos_holds": {"type": "boolean"},
    }))
}

fn outcome(monte_carlo: bool) -> Value {
    let per_message = json!({"type": "array", "items": probability()});
    if monte_carlo {
        object(json!({
            "ties": {"enum": ["equiprobable", "error", "genie"]},
            "per_message": per_message,
            "average": probability(),
            "tie_mass": probability(),
            "mode": {"const": "monte_carlo"},
            "trials": {"type": "integer", "minimum": 1},
            "seed": {"type": "integer", "minimum": 0},
            "interval": {"type": "array", "items": probability(), "minItems": 2, "maxItems": 2},
            "half_width": {"type": "number", "minimum": 0},
        }))
    } else {
        let mut v = object(json!({
            "ties": {"enum": ["equiprobable", "error", "genie"]},
            "per_message": per_message,
            "average": probability(),
            "tie_mass": probability(),
            "mode": {"const": "exact"},
            "per_message_exact": {"type": "array", "items": rational()},
            "average_exact": rational(),
        }));
        v["properties"]["corollary2_bound"] = bound();
        v
    }
}

fn bound() -> Value {
    object(json!({
        "value": {"type": "number", "minimum": 0},
        "s": ext_number(),
        "mu": ext_number(),
        "mu_prime": ext_number(),
        "delta_n": {"type": "number"},
        "trivial": {"type": "boolean"},
    }))
}

/// Schema of the `payload` field for `command`.
pub fn payload_schema(command: &str) -> Option<Value> {
    let v = match command {
        "validate" => object(json!({
            "name": {"type": ["string", "null"]},
            "input_alphabet": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "output_alphabet": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "num_inputs": {"type": "integer", "minimum": 1},
            "num_outputs": {"type": "integer", "minimum": 1},
            "w_min": rational(),
            "strict_support_match": {"type": "boolean"},
            "y_hat": {"type": "array", "items": object(json!({
                "a": index(), "b": index(), "outputs": {"type": "array", "items": index()},
            }))},
            "disjoint_pairs": {"type": "array", "items": index_pair()},
        })),
        "zero-error" | "balanced" => zero_error(),
        "exponent" => object(json!({
            "unit": unit(),
            "value": {"type": "number", "minimum": 0},
            "kind": {"enum": ["exact_equality", "upper_bound"]},
            "balanced": {"type": "boolean"},
            "q_star": {"type": "array", "items": probability(), "minItems": 1},
            "s_star": {"type": "number", "minimum": 0},
            "s_cap": {"type": "number", "minimum": 0},
            "lower_expurgated": {"type": "number"},
            "gap_bound": {"type": "number", "minimum": 0},
            "curve": {"type": ["string", "null"]},
            "method_trace": object(json!({
                "method": {"enum": ["grid", "multistart_pg", "two_point", "auto"]},
                "restarts": {"type": "integer", "minimum": 0},
                "grid_resolution": {"type": ["integer", "null"]},
                "s_grid_points": {"type": "integer", "minimum": 0},
                "q_solves": {"type": "integer", "minimum": 0},
                "alternations": {"type": "integer", "minimum": 0},
                "stages": {"type": "array", "items": object(json!({
                    "stage": {"type": "string"}, "s": ext_number(), "objective": {"type": "number"},
                }))},
                "notes": {"type": "array", "items": {"type": "string"}},
            })),
        })),
        "gap" => object(json!({
            "unit": unit(),
            "gap": {"type": "number", "minimum": 0},
            "balanced": {"type": "boolean"},
        })),
        "mu-curve" => object(json!({
            "unit": unit(),
            "s_points": {"type": "integer", "minimum": 0},
            "rows": {"type": "integer", "minimum": 0},
            "csv": {"type": ["string", "null"]},
            "data": nullable(json!({"type": "array", "items": object(json!({
                "a": index(), "b": index(), "s": {"type": "number"},
                "mu": ext_number(), "mu_prime": ext_number(),
            }))})),
        })),
        "dmin" => object(json!({
            "unit": unit(),
            "d_min": ext_number(),
            "argmin": index_pair(),
            "exponent_cap": ext_number(),
            "m": {"type": "integer", "minimum": 2},
            "n": {"type": "integer", "minimum": 1},
        })),
        "komlos" => certificate(),
        "certificate" => object(json!({
            "family": {"enum": ["raw", "relaxed"]},
            "subcode": certificate(),
            "chain": object(json!({
                "lines": {"type": "array", "minItems": 2, "items": object(json!({
                    "label": {"type": "string"}, "value": {"type": "number"},
                }))},
                "slacks": {"type": "array", "items": {"type": "number"}},
                "holds": {"type": "boolean"},
                "anchor": index_pair(),
                "s_bar_anchor": {"type": "number", "minimum": 0},
                "s_bar_max": {"type": "number", "minimum": 0},
                "s_cap": {"type": "number", "minimum": 0},
                "k": {"type": "number", "minimum": 0},
                "delta_nominal": {"type": "number"},
                "delta_observed": {"type": "number", "minimum": 0},
                "delta_used": {"type": "number"},
                "closeness": {"type": "number", "minimum": 0},
                "closeness_bound": {"type": "number"},
            })),
        })),
        "exact-pe" => outcome(false),
        "simulate" => outcome(true),
        "empirical" => object(json!({
            "unit": unit(),
            "a": index(),
            "b": index(),
            "points": {"type": "array", "items": object(json!({
                "n": {"type": "integer", "minimum": 1},
                "pe1": probability(),
                "exponent": {"type": "number"},
                "exact": {"type": "boolean"},
            }))},
            "sup_mu": ext_number(),
            "sup_mu_reverse": ext_number(),
            "delta_over_n": {"type": "array", "items": {"type": "number"}},
        })),
        _ => return None,
    };
    Some(v)
}

/// Schema of the whole result document for `command`.
pub fn document_schema(command: &str) -> Option<Value> {
    let payload = payload_schema(command)?;
    let mut v = object(json!({
        "command": {"const": command},
        "version": {"type": "string"},
        "input_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "elapsed_ms": {"type": "integer", "minimum": 0},
        "payload": payload,
    }));
    v["$schema"] = json!("https://json-schema.org/draft/2020-12/schema");
    v["additionalProperties"] = json!(false);
    Some(v)
}
