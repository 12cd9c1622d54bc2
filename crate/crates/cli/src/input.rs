//! Reading equations, graphs and sets from the command line.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lfree::graphs::{generate, parse_graph, GraphKind, VertexPartition};
use lfree::{parse_equation, Graph, LinearEquation};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn equation(text: &str) -> Result<LinearEquation> {
    parse_equation(text).with_context(|| format!("cannot parse equation {text:?}"))
}

/// Short names like `p3`, `c4`, `k3` and `e5` (path, cycle, complete, empty).
fn shorthand(spec: &str) -> Option<GraphKind> {
    let (head, tail) = spec.split_at(spec.find(|c: char| c.is_ascii_digit())?);
    let n: usize = tail.parse().ok()?;
    match head {
        "p" => Some(GraphKind::Path(n)),
        "c" => Some(GraphKind::Cycle(n)),
        "k" => Some(GraphKind::Complete(n)),
        "e" => Some(GraphKind::Empty(n)),
        _ => None,
    }
}

pub fn graph_kind(spec: &str, seed: Option<u64>) -> Result<GraphKind> {
    let kind = match shorthand(spec) {
        Some(k) => k,
        None => spec.parse::<GraphKind>().map_err(|e| anyhow!(e))?,
    };
    Ok(match (kind, seed) {
        (GraphKind::Random { n, p, .. }, Some(seed)) => GraphKind::Random { n, p, seed },
        (k, _) => k,
    })
}

pub struct GraphInput {
    pub graph: Graph,
    pub partition: Option<VertexPartition>,
    pub digest: String,
}

/// A graph file (JSON or DIMACS) if `spec` names an existing file, otherwise
/// a generator spec such as `edge`, `p3` or `random:5:0.5:7`.
pub fn graph(spec: &str, seed: Option<u64>) -> Result<GraphInput> {
    let (graph, partition) = if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).with_context(|| format!("cannot read {spec}"))?;
        parse_graph(&text).with_context(|| format!("cannot parse graph file {spec}"))?
    } else {
        (generate(&graph_kind(spec, seed)?), None)
    };
    let canonical = serde_json::to_string(&graph.to_json(partition.as_ref()))?;
    Ok(GraphInput {
        digest: digest(canonical.as_bytes()),
        graph,
        partition,
    })
}

fn set_from_value(v: &Value) -> Result<Vec<i64>> {
    let items = match v {
        Value::Array(items) => items,
        Value::Object(map) => match map.get("elements") {
            Some(Value::Array(items)) => items,
            _ => bail!("set object has no \"elements\" array"),
        },
        _ => bail!("a set must be a JSON array or an object with \"elements\""),
    };
    items
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_i64().ok_or_else(|| anyhow!("{n} is not a 64-bit integer")),
            Value::String(s) => s.parse().with_context(|| format!("{s:?} is not an integer")),
            _ => bail!("set elements must be integers"),
        })
        .collect()
}

/// Inline JSON (`[1,2,3]`), a bare comma list (`1,2,3`) or a file holding
/// either an array or a gadget (`{"elements": [...]}`).
pub fn set(spec: &str) -> Result<Vec<i64>> {
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).with_context(|| format!("cannot read {spec}"))?
    } else {
        spec.to_string()
    };
    let t = text.trim();
    if t.starts_with('[') || t.starts_with('{') {
        let v: Value = serde_json::from_str(t).with_context(|| format!("bad set JSON {t:?}"))?;
        return set_from_value(&v);
    }
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| x.trim().parse().with_context(|| format!("{:?} is not an integer", x.trim())))
        .collect()
}

/// `num/den` or a plain integer.
pub fn rational(text: &str) -> Result<BigRational> {
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: BigInt = n.trim().parse().with_context(|| format!("bad numerator in {text:?}"))?;
    let d: BigInt = d.trim().parse().with_context(|| format!("bad denominator in {text:?}"))?;
    if d == BigInt::from(0) {
        bail!("zero denominator in {text:?}");
    }
    Ok(BigRational::new(n, d))
}
