//! JSON form of a series:
//! `{"ring", "p"?, "precision"?, "guard"?, "vars", "degree", "coeffs": {"[e1,e2]": "scalar"}}`.

use serde_json::{json, Map, Value};

use super::Series;
use crate::error::{Error, Result};
use crate::ring::CoeffRing;

pub fn series_to_json<R: CoeffRing>(s: &Series<R>) -> Value {
    let ring = s.ring();
    let mut coeffs = Map::new();
    for (e, c) in s.terms() {
        let key = format!(
            "[{}]",
            e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        );
        coeffs.insert(key, Value::String(ring.format(c)));
    }
    let vars: Vec<String> = (1..=s.nvars()).map(|i| format!("t{i}")).collect();
    let mut obj = Map::new();
    obj.insert("ring".into(), json!(ring.kind()));
    if let Some(p) = ring.prime() {
        obj.insert("p".into(), json!(p));
    }
    if let Some(m) = ring.precision() {
        obj.insert("precision".into(), json!(m));
    }
    if let Some(g) = ring.guard_digits() {
        obj.insert("guard".into(), json!(g));
    }
    obj.insert("vars".into(), json!(vars));
    obj.insert("degree".into(), json!(s.degree()));
    obj.insert("coeffs".into(), Value::Object(coeffs));
    Value::Object(obj)
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

pub fn series_from_json<R: CoeffRing>(ring: &R, v: &Value) -> Result<Series<R>> {
    let obj = v.as_object().ok_or_else(|| malformed("series must be a JSON object"))?;
    let kind = obj
        .get("ring")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("series is missing \"ring\""))?;
    if kind != ring.kind() {
        return Err(malformed(format!("expected a {} series, found {kind}", ring.kind())));
    }
    if let Some(p) = ring.prime() {
        let found = obj.get("p").and_then(Value::as_u64);
        if found != Some(p) {
            return Err(malformed(format!("series prime {found:?} does not match {p}")));
        }
    }
    let nvars = obj
        .get("vars")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("series is missing \"vars\""))?
        .len();
    let degree = obj
        .get("degree")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("series is missing \"degree\""))? as u32;
    let coeffs = obj
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| malformed("series is missing \"coeffs\""))?;
    let mut s = Series::zero(ring, nvars, degree);
    for (key, val) in coeffs {
        let exp = parse_exponent(key)?;
        if exp.len() != nvars {
            return Err(malformed(format!("exponent {key} has the wrong arity")));
        }
        if exp.iter().sum::<u32>() > degree {
            return Err(malformed(format!("exponent {key} exceeds degree {degree}")));
        }
        let text = val
            .as_str()
            .ok_or_else(|| malformed(format!("coefficient of {key} must be a string")))?;
        s.set(&exp, ring.parse(text)?);
    }
    Ok(s)
}

fn parse_exponent(key: &str) -> Result<Vec<u32>> {
    let inner = key
        .trim()
        .strip_prefix('[')
        .and_then(|k| k.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("bad exponent key {key:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent key {key:?}")))
        })
        .collect()
}
