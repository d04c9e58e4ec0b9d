//! File formats: diagrams, cylinder functions, algebra elements, rationals.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::function::CylinderFunction;
use crate::scalar::{format_rational, parse_rational, Scalar};
use crate::space::PathSpace;
use crate::{builtin, OrderedDiagram, Rational};

pub fn ser_rational<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub fn ser_rationals<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<String> = xs.iter().map(format_rational).collect();
    strings.serialize(s)
}

pub fn rational_json(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// A JSON number or `"p/q"` string as an exact rational.
pub fn value_to_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| Error::Parse(format!("bad rational '{s}'"))),
        Value::Number(n) => {
            let text = n.to_string();
            parse_rational(&text)
                .or_else(|| n.as_f64().map(Rational::from_real))
                .ok_or_else(|| Error::Parse(format!("bad number {text}")))
        }
        other => Err(Error::Parse(format!("expected a number or \"p/q\", got {other}"))),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A builtin name or a JSON file.
pub fn load_diagram(reference: &str) -> Result<OrderedDiagram> {
    if builtin::NAMES.contains(&reference) {
        return builtin::by_name(reference);
    }
    OrderedDiagram::from_json(&read(Path::new(reference))?)
}

/// `{"level": m, "values": {"index": value}}`; absent indices are zero.
pub fn function_from_json(space: &PathSpace, v: &Value) -> Result<CylinderFunction<Rational>> {
    let level = v
        .get("level")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("function needs an integer \"level\"".into()))? as usize;
    let values = v
        .get("values")
        .ok_or_else(|| Error::Parse("function needs \"values\"".into()))?;
    space.require(level)?;
    let count = space.table.count(level);
    let mut out = vec![Rational::zero(); count];
    match values {
        Value::Object(map) => {
            for (key, x) in map {
                let i: usize = key.parse().map_err(|_| Error::Parse(format!("bad path index '{key}'")))?;
                if i >= count {
                    return Err(Error::Parse(format!("path index {i} beyond {count} paths at level {level}")));
                }
                out[i] = value_to_rational(x)?;
            }
        }
        Value::Array(items) => {
            if items.len() != count {
                return Err(Error::Parse(format!("expected {count} values, got {}", items.len())));
            }
            for (slot, x) in out.iter_mut().zip(items) {
                *slot = value_to_rational(x)?;
            }
        }
        _ => return Err(Error::Parse("\"values\" must be an object or array".into())),
    }
    CylinderFunction::new(space, level, out)
}

pub fn load_function(space: &PathSpace, path: &Path) -> Result<CylinderFunction<Rational>> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?;
    function_from_json(space, &v)
}

pub fn function_to_json(h: &CylinderFunction<Rational>) -> Value {
    let values: Map<String, Value> =
        h.values().iter().enumerate().map(|(i, x)| (i.to_string(), rational_json(x))).collect();
    serde_json::json!({ "level": h.level(), "values": values })
}

/// Float-valued rendering for reports.
pub fn function_to_json_f64<S: Scalar>(h: &CylinderFunction<S>) -> Value {
    let values: Map<String, Value> =
        h.values().iter().enumerate().map(|(i, x)| (i.to_string(), Value::from(x.to_real() + 0.0))).collect();
    serde_json::json!({ "level": h.level(), "values": values })
}

/// `{"alpha": a, "coeffs": {"k": function or "file.json"}}`.
pub fn element_from_json(
    space: &PathSpace,
    v: &Value,
    base: Option<&Path>,
) -> Result<(f64, BTreeMap<i64, CylinderFunction<Rational>>)> {
    let alpha = v
        .get("alpha")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse("element needs a numeric \"alpha\"".into()))?;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("element needs \"coeffs\"".into()))?;
    let mut out = BTreeMap::new();
    for (key, item) in coeffs {
        let k: i64 = key.parse().map_err(|_| Error::Parse(format!("bad coefficient index '{key}'")))?;
        let f = match item {
            Value::String(file) => {
                let p = base.map_or_else(|| Path::new(file).to_path_buf(), |b| b.join(file));
                load_function(space, &p)?
            }
            other => function_from_json(space, other)?,
        };
        out.insert(k, f);
    }
    Ok((alpha, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_round_trip() {
        let space = PathSpace::new(builtin::fib(), 3).unwrap();
        let v = serde_json::json!({"level": 2, "values": {"0": "1/3", "4": -2, "2": 0.5}});
        let h = function_from_json(&space, &v).unwrap();
        assert_eq!(h.values()[0], Rational::new(1.into(), 3.into()));
        assert_eq!(h.values()[2], Rational::new(1.into(), 2.into()));
        let back = function_from_json(&space, &function_to_json(&h)).unwrap();
        assert_eq!(back, h);
        let bad = serde_json::json!({"level": 2, "values": {"9": 1}});
        assert!(matches!(function_from_json(&space, &bad), Err(Error::Parse(_))));
    }
}
