//! JSON codecs. Rationals travel as "p/q" strings (integers as "p"),
//! polytopes as sorted vertex lists.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::discriminant::CoefficientSpec;
use crate::fiber::SplitPolytope;
use crate::obstruction::{ObstructionTable, PointConfiguration};
use crate::polytope::Polytope;
use crate::rational::{fmt_q, parse_q, QVec, Q};
use crate::volume::PolytopePair;

/// Input that does not match the expected shape; distinct from math errors.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

pub type SchemaResult<T> = std::result::Result<T, SchemaError>;

fn schema(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError { path: path.to_string(), message: message.into() }
}

pub fn q_to_json(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => Value::String(x.to_string()),
    }
}

pub fn qvec_to_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(q_to_json).collect())
}

pub fn q_from_json(v: &Value, path: &str) -> SchemaResult<Q> {
    match v {
        Value::String(s) => parse_q(s).ok_or_else(|| schema(path, format!("not a rational: {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(|x| Q::from_integer(x.into()))
            .ok_or_else(|| schema(path, "numbers must be integers; write fractions as \"p/q\"")),
        _ => Err(schema(path, "expected a rational")),
    }
}

pub fn qvec_from_json(v: &Value, path: &str) -> SchemaResult<QVec> {
    let xs = v.as_array().ok_or_else(|| schema(path, "expected an array"))?;
    xs.iter().enumerate().map(|(i, x)| q_from_json(x, &format!("{path}[{i}]"))).collect()
}

fn int_from_json(v: &Value, path: &str) -> SchemaResult<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| schema(path, "expected an integer")),
        Value::String(s) => s.parse().map_err(|_| schema(path, format!("not an integer: {s:?}"))),
        _ => Err(schema(path, "expected an integer")),
    }
}

fn usize_field(obj: &Map<String, Value>, key: &str, path: &str) -> SchemaResult<usize> {
    let v = obj.get(key).ok_or_else(|| schema(path, format!("missing field {key:?}")))?;
    let x = int_from_json(v, &format!("{path}.{key}"))?;
    usize::try_from(x).map_err(|_| schema(&format!("{path}.{key}"), "expected a nonnegative integer"))
}

fn object<'a>(v: &'a Value, path: &str) -> SchemaResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> SchemaResult<&'a Value> {
    obj.get(key).ok_or_else(|| schema(path, format!("missing field {key:?}")))
}

fn points_from_json(v: &Value, path: &str) -> SchemaResult<Vec<QVec>> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array of points"))?;
    if arr.is_empty() {
        return Err(schema(path, "no points"));
    }
    let pts: Vec<QVec> =
        arr.iter().enumerate().map(|(i, p)| qvec_from_json(p, &format!("{path}[{i}]"))).collect::<SchemaResult<_>>()?;
    if pts.iter().any(|p| p.len() != pts[0].len()) {
        return Err(schema(path, "points of different lengths"));
    }
    Ok(pts)
}

fn sorted_vertices(p: &Polytope) -> Vec<QVec> {
    let mut vs = p.vertices().to_vec();
    vs.sort();
    vs
}

pub fn polytope_to_json(p: &Polytope) -> Value {
    json!({
        "ambient_dim": p.ambient_dim(),
        "dim": p.dim(),
        "vertices": sorted_vertices(p).iter().map(|v| qvec_to_json(v)).collect::<Vec<_>>(),
    })
}

/// Accepts a bare point array, or an object with "vertices" or "points";
/// the polytope is their convex hull either way.
pub fn polytope_from_json(v: &Value, path: &str) -> SchemaResult<Polytope> {
    let pts = match v {
        Value::Array(_) => points_from_json(v, path)?,
        Value::Object(obj) => {
            let (key, pts) = match (obj.get("vertices"), obj.get("points")) {
                (Some(p), _) => ("vertices", p),
                (None, Some(p)) => ("points", p),
                (None, None) => return Err(schema(path, "expected \"vertices\" or \"points\"")),
            };
            let pts = points_from_json(pts, &format!("{path}.{key}"))?;
            if let Some(d) = obj.get("ambient_dim") {
                let d = int_from_json(d, &format!("{path}.ambient_dim"))?;
                if d as usize != pts[0].len() {
                    return Err(schema(path, "ambient_dim disagrees with the point length"));
                }
            }
            pts
        }
        _ => return Err(schema(path, "expected a polytope")),
    };
    Ok(Polytope::hull_of(&pts))
}

pub fn config_to_json(a: &PointConfiguration) -> Value {
    json!({ "dim": a.ambient_dim(), "points": a.points() })
}

pub fn config_from_json(v: &Value, path: &str) -> SchemaResult<PointConfiguration> {
    let obj = object(v, path)?;
    let dim = usize_field(obj, "dim", path)?;
    let arr = field(obj, "points", path)?.as_array().ok_or_else(|| schema(path, "\"points\" must be an array"))?;
    let mut pts = Vec::with_capacity(arr.len());
    for (i, p) in arr.iter().enumerate() {
        let p_path = format!("{path}.points[{i}]");
        let coords = p.as_array().ok_or_else(|| schema(&p_path, "expected an integer point"))?;
        pts.push(
            coords
                .iter()
                .enumerate()
                .map(|(j, x)| int_from_json(x, &format!("{p_path}[{j}]")))
                .collect::<SchemaResult<Vec<i64>>>()?,
        );
    }
    PointConfiguration::new(dim, pts).map_err(|e| schema(path, e.to_string()))
}

pub fn split_to_json(d: &SplitPolytope) -> Value {
    json!({ "n": d.n, "k": d.k, "polytope": polytope_to_json(&d.polytope) })
}

pub fn split_from_json(v: &Value, path: &str) -> SchemaResult<SplitPolytope> {
    let obj = object(v, path)?;
    let n = usize_field(obj, "n", path)?;
    let k = usize_field(obj, "k", path)?;
    let p = polytope_from_json(field(obj, "polytope", path)?, &format!("{path}.polytope"))?;
    SplitPolytope::new(n, k, p).map_err(|e| schema(path, e.to_string()))
}

pub fn pair_to_json(p: &PolytopePair) -> Value {
    json!({
        "big": polytope_to_json(&p.big),
        "small": polytope_to_json(&p.small),
        "rays": p.rays.iter().map(|r| qvec_to_json(r)).collect::<Vec<_>>(),
    })
}

pub fn pair_from_json(v: &Value, path: &str) -> SchemaResult<PolytopePair> {
    let obj = object(v, path)?;
    let big = polytope_from_json(field(obj, "big", path)?, &format!("{path}.big"))?;
    let small = polytope_from_json(field(obj, "small", path)?, &format!("{path}.small"))?;
    let rays = match obj.get("rays") {
        None => vec![],
        Some(r) => {
            let arr = r.as_array().ok_or_else(|| schema(path, "\"rays\" must be an array"))?;
            arr.iter()
                .enumerate()
                .map(|(i, x)| qvec_from_json(x, &format!("{path}.rays[{i}]")))
                .collect::<SchemaResult<_>>()?
        }
    };
    Ok(PolytopePair { big, small, rays })
}

fn point_key(a: &[i64]) -> String {
    format!("[{}]", a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn parse_point_key(s: &str, path: &str) -> SchemaResult<Vec<i64>> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Ok(vec![]);
    }
    inner.split(',').map(|x| x.trim().parse().map_err(|_| schema(path, format!("bad point key {s:?}")))).collect()
}

pub fn spec_to_json(spec: &CoefficientSpec) -> Value {
    let coeffs: Map<String, Value> =
        spec.config().points().iter().zip(spec.coeffs()).map(|(a, p)| (point_key(a), polytope_to_json(p))).collect();
    json!({ "config": config_to_json(spec.config()), "coeffs": coeffs })
}

/// `{"config": .., "coeffs": {"[a]": polytope}}`, or `{"universal": true, "config": ..}`.
pub fn spec_from_json(v: &Value, path: &str) -> SchemaResult<CoefficientSpec> {
    let obj = object(v, path)?;
    let config = config_from_json(field(obj, "config", path)?, &format!("{path}.config"))?;
    if obj.get("universal").and_then(Value::as_bool) == Some(true) {
        return Ok(CoefficientSpec::universal(config));
    }
    let coeffs = object(field(obj, "coeffs", path)?, &format!("{path}.coeffs"))?;
    let mut pairs = Vec::with_capacity(coeffs.len());
    for (key, p) in coeffs {
        let c_path = format!("{path}.coeffs.{key}");
        pairs.push((parse_point_key(key, &c_path)?, polytope_from_json(p, &c_path)?));
    }
    let mut keys: Vec<&Vec<i64>> = pairs.iter().map(|(a, _)| a).collect();
    keys.sort();
    let want: Vec<&Vec<i64>> = config.points().iter().collect();
    if keys != want {
        return Err(schema(&format!("{path}.coeffs"), "coefficient keys must be exactly the configuration points"));
    }
    CoefficientSpec::from_pairs(config.ambient_dim(), pairs).map_err(|e| schema(path, e.to_string()))
}

pub fn table_to_json(a: &PointConfiguration, t: &ObstructionTable) -> Value {
    let ints = |m: &Vec<Vec<BigInt>>| -> Value {
        m.iter().map(|row| row.iter().map(int_to_json).collect::<Vec<_>>()).collect()
    };
    json!({
        "faces": t.faces.iter().map(|f| json!({ "dim": f.dim, "points": a.face_points(f) })).collect::<Vec<_>>(),
        "c": ints(&t.c),
        "e": ints(&t.e),
    })
}

/// A list of items, either a bare array or under `key`.
pub fn list<'a>(v: &'a Value, key: &str, path: &str) -> SchemaResult<Vec<(String, &'a Value)>> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(obj) => {
            field(obj, key, path)?.as_array().ok_or_else(|| schema(path, format!("{key:?} must be an array")))?
        }
        _ => return Err(schema(path, "expected an array")),
    };
    Ok(arr.iter().enumerate().map(|(i, x)| (format!("{path}[{i}]"), x)).collect())
}
