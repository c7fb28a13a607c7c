//! JSON encoding of instances, walks and solutions.
//!
//! Parsing goes through [`serde_json::Value`] by hand so that every error can
//! name the offending field path.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{
    EdgeSpec, Instance, RawDecomposition, Solution, Time, TimeWindow, Topology, VertexSpec, Walk,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Malformed,
    Schema,
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind:?} error at `{path}`: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub path: String,
    pub message: String,
}

impl ParseError {
    fn schema(path: &str, message: impl Into<String>) -> Self {
        ParseError {
            kind: ParseErrorKind::Schema,
            path: path.to_string(),
            message: message.into(),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

fn parse_text(text: &str) -> PResult<Value> {
    serde_json::from_str(text).map_err(|e| ParseError {
        kind: ParseErrorKind::Malformed,
        path: String::new(),
        message: e.to_string(),
    })
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> PResult<&'a Value> {
    obj.get(key)
        .ok_or_else(|| ParseError::schema(&join(path, key), format!("missing field \"{key}\"")))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> PResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| ParseError::schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> PResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| ParseError::schema(path, "expected an array"))
}

/// Non-negative integer that fits in 63 bits.
fn int(v: &Value, path: &str) -> PResult<i64> {
    let Value::Number(num) = v else {
        return Err(ParseError::schema(path, "expected an integer"));
    };
    if let Some(i) = num.as_i64() {
        if i < 0 {
            return Err(ParseError::schema(path, "must be non-negative"));
        }
        return Ok(i);
    }
    let too_big = num.as_u64().is_some()
        || num
            .as_f64()
            .is_some_and(|f| f.fract() == 0.0 && f.abs() >= 9.223_372_036_854_776e18);
    if too_big {
        return Err(ParseError {
            kind: ParseErrorKind::Overflow,
            path: path.to_string(),
            message: "integer does not fit in 63 bits".into(),
        });
    }
    Err(ParseError::schema(path, "expected an integer"))
}

fn index(v: &Value, path: &str) -> PResult<usize> {
    int(v, path).map(|i| i as usize)
}

fn intervals(v: &Value, path: &str) -> PResult<Vec<TimeWindow>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let p = format!("{path}[{k}]");
            let pair = array(w, &p)?;
            if pair.len() != 2 {
                return Err(ParseError::schema(&p, "expected [start, end]"));
            }
            Ok(TimeWindow::new(
                int(&pair[0], &format!("{p}[0]"))?,
                int(&pair[1], &format!("{p}[1]"))?,
            ))
        })
        .collect()
}

fn decomposition(v: &Value, path: &str) -> PResult<RawDecomposition> {
    let obj = object(v, path)?;
    let bags_path = join(path, "bags");
    let bags = array(field(obj, "bags", path)?, &bags_path)?
        .iter()
        .enumerate()
        .map(|(i, bag)| {
            let p = format!("{bags_path}[{i}]");
            array(bag, &p)?
                .iter()
                .enumerate()
                .map(|(k, x)| index(x, &format!("{p}[{k}]")))
                .collect::<PResult<Vec<usize>>>()
        })
        .collect::<PResult<Vec<_>>>()?;
    let tree_path = join(path, "tree");
    let tree = array(field(obj, "tree", path)?, &tree_path)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = format!("{tree_path}[{i}]");
            let pair = array(e, &p)?;
            if pair.len() != 2 {
                return Err(ParseError::schema(&p, "expected [parent, child]"));
            }
            Ok((index(&pair[0], &format!("{p}[0]"))?, index(&pair[1], &format!("{p}[1]"))?))
        })
        .collect::<PResult<Vec<_>>>()?;
    Ok(RawDecomposition { bags, tree })
}

pub fn parse_instance(text: &str) -> PResult<Instance> {
    let root = parse_text(text)?;
    instance_from_value(&root)
}

fn instance_from_value(root: &Value) -> PResult<Instance> {
    let obj = object(root, "")?;
    let topo_v = field(obj, "topology", "")?;
    let topology = topo_v
        .as_str()
        .and_then(Topology::parse)
        .ok_or_else(|| ParseError::schema("topology", "unknown topology"))?;
    let n = index(field(obj, "n", "")?, "n")?;
    let start = index(field(obj, "start", "")?, "start")?;
    let budget = int(field(obj, "budget", "")?, "budget")?;

    let vertices = array(field(obj, "vertices", "")?, "vertices")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let p = format!("vertices[{i}]");
            let o = object(v, &p)?;
            let profit = int(field(o, "profit", &p)?, &join(&p, "profit"))?;
            let windows = match o.get("windows") {
                Some(w) => intervals(w, &join(&p, "windows"))?,
                None => Vec::new(),
            };
            Ok(VertexSpec { profit, windows })
        })
        .collect::<PResult<Vec<_>>>()?;
    if vertices.len() != n {
        return Err(ParseError::schema(
            "vertices",
            format!("expected {n} vertices, found {}", vertices.len()),
        ));
    }

    let edges = array(field(obj, "edges", "")?, "edges")?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = format!("edges[{i}]");
            let o = object(e, &p)?;
            let u = index(field(o, "u", &p)?, &join(&p, "u"))?;
            let v = index(field(o, "v", &p)?, &join(&p, "v"))?;
            let cost = int(field(o, "cost", &p)?, &join(&p, "cost"))?;
            let active = match o.get("active") {
                None | Some(Value::Null) => None,
                Some(a) => Some(intervals(a, &join(&p, "active"))?),
            };
            Ok(EdgeSpec { u, v, cost, active })
        })
        .collect::<PResult<Vec<_>>>()?;

    let decomposition = match obj.get("decomposition") {
        None | Some(Value::Null) => None,
        Some(d) => Some(decomposition(d, "decomposition")?),
    };
    let inferred = vertices.iter().any(|v| !v.windows.is_empty());
    let timed = match obj.get("time_windows") {
        None => inferred,
        Some(v) => v
            .as_bool()
            .ok_or_else(|| ParseError::schema("time_windows", "expected a boolean"))?,
    };
    Ok(Instance {
        topology,
        start,
        budget,
        vertices,
        edges,
        decomposition,
        timed,
    })
}

fn windows_value(ws: &[TimeWindow]) -> Value {
    Value::Array(ws.iter().map(|w| json!([w.release, w.deadline])).collect())
}

pub(crate) fn instance_to_value(inst: &Instance) -> Value {
    let mut obj = Map::new();
    obj.insert("topology".into(), json!(inst.topology.as_str()));
    obj.insert("n".into(), json!(inst.n()));
    obj.insert("start".into(), json!(inst.start));
    obj.insert("budget".into(), json!(inst.budget));
    obj.insert(
        "vertices".into(),
        Value::Array(
            inst.vertices
                .iter()
                .map(|v| json!({"profit": v.profit, "windows": windows_value(&v.windows)}))
                .collect(),
        ),
    );
    obj.insert(
        "edges".into(),
        Value::Array(
            inst.edges
                .iter()
                .map(|e| {
                    let mut o = json!({"u": e.u, "v": e.v, "cost": e.cost});
                    if let Some(a) = &e.active {
                        o["active"] = windows_value(a);
                    }
                    o
                })
                .collect(),
        ),
    );
    if let Some(d) = &inst.decomposition {
        obj.insert(
            "decomposition".into(),
            json!({
                "bags": d.bags,
                "tree": d.tree.iter().map(|&(p, c)| json!([p, c])).collect::<Vec<_>>(),
            }),
        );
    }
    if inst.timed != inst.has_windows() {
        obj.insert("time_windows".into(), json!(inst.timed));
    }
    Value::Object(obj)
}

/// A standalone `{"bags": .., "tree": ..}` block.
pub fn parse_decomposition(text: &str) -> PResult<RawDecomposition> {
    decomposition(&parse_text(text)?, "")
}

pub fn serialize_decomposition(d: &RawDecomposition) -> String {
    serde_json::to_string(&json!({
        "bags": d.bags,
        "tree": d.tree.iter().map(|&(p, c)| json!([p, c])).collect::<Vec<_>>(),
    }))
    .expect("decomposition serializes")
}

pub fn serialize_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_value(inst)).expect("instance serializes")
}

fn walk_from_value(v: &Value, path: &str) -> PResult<Walk> {
    let obj = object(v, path)?;
    let vp = join(path, "visits");
    let visits = array(field(obj, "visits", path)?, &vp)?
        .iter()
        .enumerate()
        .map(|(k, pair)| {
            let p = format!("{vp}[{k}]");
            let a = array(pair, &p)?;
            if a.len() != 2 {
                return Err(ParseError::schema(&p, "expected [vertex, time]"));
            }
            Ok((index(&a[0], &format!("{p}[0]"))?, int(&a[1], &format!("{p}[1]"))? as Time))
        })
        .collect::<PResult<Vec<_>>>()?;
    Ok(Walk { visits })
}

pub(crate) fn walk_to_value(w: &Walk) -> Value {
    json!({"visits": w.visits.iter().map(|&(v, t)| json!([v, t])).collect::<Vec<_>>()})
}

pub fn parse_walk(text: &str) -> PResult<Walk> {
    walk_from_value(&parse_text(text)?, "")
}

pub fn serialize_walk(w: &Walk) -> String {
    serde_json::to_string(&walk_to_value(w)).expect("walk serializes")
}

pub fn parse_solution(text: &str) -> PResult<Solution> {
    let root = parse_text(text)?;
    let obj = object(&root, "")?;
    let profit = int(field(obj, "profit", "")?, "profit")?;
    let walk = walk_from_value(field(obj, "walk", "")?, "walk")?;
    let algorithm = field(obj, "algorithm", "")?
        .as_str()
        .ok_or_else(|| ParseError::schema("algorithm", "expected a string"))?
        .to_string();
    Ok(Solution {
        profit,
        walk,
        algorithm,
    })
}

pub fn serialize_solution(s: &Solution) -> String {
    serde_json::to_string_pretty(&json!({
        "profit": s.profit,
        "walk": walk_to_value(&s.walk),
        "algorithm": s.algorithm,
    }))
    .expect("solution serializes")
}
