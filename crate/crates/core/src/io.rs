//! JSON wire formats and decimal formatting.
//!
//! Points travel as `{"x0": "<decimal string>", "prefix": [ints], "tail":
//! {"kind": "const"|"infinity"|"arith", "start": M, ...}}`. The x0 string is
//! the shortest representation that parses back to the same float, so every
//! emitted point re-parses to an equal point. All other real-valued fields
//! are decimal strings with 15 significant digits; integer fields are plain
//! JSON numbers.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::certify::{LimitPrediction, PairCertificate, RefutationReport};
use crate::space::{Point, PointError, TailSpec};
use crate::witness::WitnessParams;

/// Errors from parsing input files and building output documents.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid point: {0}")]
    Point(#[from] PointError),
    #[error("field \"{field}\": {message}")]
    Field { field: &'static str, message: String },
}

/// Formats a real with 15 significant digits as a plain decimal string,
/// trailing zeros trimmed.
pub fn format_decimal(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always contains an exponent");
    let exp: i32 = exp.parse().expect("{:e} exponents are integers");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point_pos = exp + 1;

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point_pos <= 0 {
        out.push_str("0.");
        for _ in 0..(-point_pos) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if point_pos as usize >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point_pos as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point_pos as usize]);
        out.push('.');
        out.push_str(&digits[point_pos as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

#[derive(Deserialize)]
struct PointJson {
    x0: X0Json,
    #[serde(default)]
    prefix: Vec<u64>,
    tail: TailJson,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum X0Json {
    Text(String),
    Number(f64),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TailJson {
    Const { start: usize, value: u64 },
    Infinity { start: usize },
    Arith { start: usize, a: u64 },
}

/// Parses a point from a JSON value.
pub fn point_from_value(v: &Value) -> Result<Point, IoError> {
    let raw: PointJson = serde_json::from_value(v.clone())?;
    let x0 = match raw.x0 {
        X0Json::Number(n) => n,
        X0Json::Text(s) => s.trim().parse::<f64>().map_err(|e| IoError::Field {
            field: "x0",
            message: format!("not a decimal number: {e}"),
        })?,
    };
    let tail = match raw.tail {
        TailJson::Const { start, value } => TailSpec::constant(start, value),
        TailJson::Infinity { start } => TailSpec::infinity(start),
        TailJson::Arith { start, a } => TailSpec::arith(start, a),
    };
    Ok(Point::new(x0, raw.prefix, tail)?)
}

/// Parses a point from JSON text.
pub fn point_from_str(s: &str) -> Result<Point, IoError> {
    let v: Value = serde_json::from_str(s)?;
    point_from_value(&v)
}

/// Parses a pair file: `{"x": <point>, "y": <point>}`.
pub fn pair_from_str(s: &str) -> Result<(Point, Point), IoError> {
    let v: Value = serde_json::from_str(s)?;
    let x = v
        .get("x")
        .ok_or(IoError::Field { field: "x", message: "missing from pair document".to_string() })?;
    let y = v
        .get("y")
        .ok_or(IoError::Field { field: "y", message: "missing from pair document".to_string() })?;
    Ok((point_from_value(x)?, point_from_value(y)?))
}

/// Parses a set file: `{"points": [<point>, ...]}`.
pub fn set_from_str(s: &str) -> Result<Vec<Point>, IoError> {
    let v: Value = serde_json::from_str(s)?;
    let points = v.get("points").and_then(Value::as_array).ok_or(IoError::Field {
        field: "points",
        message: "missing or not an array".to_string(),
    })?;
    points.iter().map(point_from_value).collect()
}

/// Serializes a point. The x0 string is exact, so parsing it back yields an
/// equal point.
pub fn point_to_value(p: &Point) -> Value {
    let tail = match *p.tail() {
        TailSpec::Const { start, value } => {
            json!({"kind": "const", "start": start, "value": value})
        }
        TailSpec::Infinity { start } => json!({"kind": "infinity", "start": start}),
        TailSpec::Arith { start, a } => json!({"kind": "arith", "start": start, "a": a}),
    };
    json!({
        "x0": format!("{}", p.x0().get()),
        "prefix": p.prefix(),
        "tail": tail,
    })
}

/// Builds the witness document: the input point, the constructed neighbor,
/// the construction parameters, the verified distance, and the result of
/// the independent neighborhood-membership check.
pub fn witness_value(
    x: &Point,
    y: &Point,
    params: &WitnessParams,
    distance: f64,
    contained: bool,
) -> Value {
    json!({
        "case": params.kind.label(),
        "params": {
            "m": params.m,
            "k": params.k,
            "delta": format_decimal(params.delta),
        },
        "x": point_to_value(x),
        "y": point_to_value(y),
        "distance": format_decimal(distance),
        "in_neighborhood": contained,
    })
}

/// Builds the certificate document. `verdict` distinguishes complete
/// evidence from a budget-exhausted partial.
pub fn certificate_value(cert: &PairCertificate, verdict: &str) -> Value {
    let times =
        |v: &[crate::certify::TimedDistance]| -> Vec<u64> { v.iter().map(|td| td.time).collect() };
    let observations = |v: &[crate::certify::TimedDistance]| -> Vec<Value> {
        v.iter()
            .map(|td| json!({"time": td.time, "distance": format_decimal(td.distance)}))
            .collect()
    };
    json!({
        "verdict": verdict,
        "epsilon": format_decimal(cert.epsilon),
        "budget": cert.budget,
        "proximal_times": times(&cert.proximal),
        "separation_times": times(&cert.separation),
        "proximal": observations(&cert.proximal),
        "separation": observations(&cert.separation),
        "bounds": {
            "liminf_upper_bound": cert.liminf_upper_bound().map(format_decimal),
            "limsup_lower_bound": cert.limsup_lower_bound().map(format_decimal),
        },
    })
}

/// Builds the limit-prediction document.
pub fn prediction_value(p: &LimitPrediction) -> Value {
    let mut r_values = Map::new();
    for (offset, r) in p.r_head.iter().enumerate() {
        r_values.insert((offset + 1).to_string(), json!(r));
    }
    json!({
        "verdict": "limit-exists",
        "applicable": p.case.label(),
        "limit_circle_raw": format_decimal(p.limit_circle_raw),
        "limit_D": format_decimal(p.limit_d),
        "r_values": r_values,
        "max_r": p.max_r,
    })
}

/// Builds the refutation document.
pub fn report_value(r: &RefutationReport) -> Value {
    let violation = r.violation.as_ref().map(|ev| {
        json!({
            "index_a": ev.index_a,
            "index_b": ev.index_b,
            "prediction": prediction_value(&ev.prediction),
            "simulated_distance": format_decimal(ev.simulated_distance),
            "sim_horizon": ev.sim_horizon,
            "agreement_tol": format_decimal(ev.agreement_tol),
            "agrees": ev.agrees,
        })
    });
    json!({
        "verdict": r.verdict.label(),
        "eps": format_decimal(r.eps),
        "l_values": r.l_values,
        "violation": violation,
    })
}
