//! File formats: a line-oriented text format for instances and a JSON
//! document for sparsifiers.
//!
//! Instances are text so fixtures stay hand-editable: a `graph n m k`
//! header, one `terminals` line, and `m` edge lines with optional exact
//! rational capacities. Sparsifiers are JSON because they carry provenance
//! and certificates; capacities are emitted as exact numerator/denominator
//! strings plus a float approximation for human readers. Both formats are
//! byte-stable: serializing the same graph twice gives identical output.

use serde_json::{json, Map, Value};
use sparsetree::rational::{format_rational, parse_rational, to_f64};
use sparsetree::verify::{ExactnessReport, FlowCertificate, QualityReport};
use sparsetree::{CapacitatedGraph, Rational};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Structure(String),
}

fn at(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line { line, message: message.into() }
}

/// Parse the text instance format. Comments start with `#`; the header
/// counts must match the body exactly; capacities are integers or `p/q`
/// rationals, never floats.
pub fn parse_instance(text: &str) -> Result<CapacitatedGraph, FormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut terminals: Option<Vec<String>> = None;
    let mut edges: Vec<(String, String, Rational)> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next().unwrap() {
            "graph" => {
                if header.is_some() {
                    return Err(at(line, "duplicate graph header"));
                }
                let mut field = |name: &str| {
                    tokens
                        .next()
                        .ok_or_else(|| at(line, format!("graph header is missing <{name}>")))?
                        .parse::<usize>()
                        .map_err(|_| at(line, format!("<{name}> must be a nonnegative integer")))
                };
                let n = field("n")?;
                let m = field("m")?;
                let k = field("k")?;
                if tokens.next().is_some() {
                    return Err(at(line, "graph header has trailing tokens"));
                }
                header = Some((n, m, k));
            }
            "terminals" => {
                if terminals.is_some() {
                    return Err(at(line, "duplicate terminals line"));
                }
                terminals = Some(tokens.map(str::to_owned).collect());
            }
            "edge" => {
                let mut id = |name: &str| {
                    tokens
                        .next()
                        .map(str::to_owned)
                        .ok_or_else(|| at(line, format!("edge is missing <{name}>")))
                };
                let u = id("u")?;
                let v = id("v")?;
                let capacity = match tokens.next() {
                    None => Rational::from_integer(1.into()),
                    Some(word) => parse_rational(word)
                        .map_err(|e| at(line, format!("bad capacity `{word}`: {e}")))?,
                };
                if tokens.next().is_some() {
                    return Err(at(line, "edge line has trailing tokens"));
                }
                edges.push((u, v, capacity));
            }
            other => {
                return Err(at(line, format!("unknown directive `{other}`")));
            }
        }
    }

    let (n, m, k) = header.ok_or(FormatError::Structure("missing graph header".into()))?;
    let terminals =
        terminals.ok_or(FormatError::Structure("missing terminals line".into()))?;
    if terminals.len() != k {
        return Err(FormatError::Structure(format!(
            "header declares {k} terminals, found {}",
            terminals.len()
        )));
    }
    if edges.len() != m {
        return Err(FormatError::Structure(format!(
            "header declares {m} edges, found {}",
            edges.len()
        )));
    }
    let mut vertices: BTreeSet<String> = terminals.iter().cloned().collect();
    for (u, v, _) in &edges {
        vertices.insert(u.clone());
        vertices.insert(v.clone());
    }
    if vertices.len() != n {
        return Err(FormatError::Structure(format!(
            "header declares {n} vertices, found {}",
            vertices.len()
        )));
    }
    CapacitatedGraph::new(vertices, terminals, edges)
        .map_err(|e| FormatError::Structure(e.to_string()))
}

/// Canonical text form: header, sorted terminals, sorted edges. Unit
/// capacities are left implicit, everything else prints as `p/q` or an
/// integer. `parse_instance(serialize_instance(g)) == g` exactly.
pub fn serialize_instance(g: &CapacitatedGraph) -> String {
    let mut out = format!(
        "graph {} {} {}\n",
        g.vertex_count(),
        g.edge_count(),
        g.terminal_count()
    );
    out.push_str("terminals");
    for t in g.terminals() {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    let one = Rational::from_integer(1.into());
    for (u, v, c) in g.edges() {
        if *c == one {
            out.push_str(&format!("edge {u} {v}\n"));
        } else {
            out.push_str(&format!("edge {u} {v} {}\n", format_rational(c)));
        }
    }
    out
}

fn rational_fields(c: &Rational) -> (String, String, f64) {
    (c.numer().to_string(), c.denom().to_string(), to_f64(c))
}

/// Edge list as JSON records with exact `num`/`den` strings in lowest terms
/// and a float `approx` for human readers.
pub fn edges_json(g: &CapacitatedGraph) -> Vec<Value> {
    g.edges()
        .map(|(u, v, c)| {
            let (num, den, approx) = rational_fields(c);
            json!({ "u": u, "v": v, "num": num, "den": den, "approx": approx })
        })
        .collect()
}

/// The JSON sparsifier document. `certificate` is attached verbatim when
/// present.
pub fn sparsifier_json(
    h: &CapacitatedGraph,
    provenance: Value,
    certificate: Option<Value>,
) -> Value {
    let edges = edges_json(h);
    let mut doc = Map::new();
    doc.insert("vertices".into(), json!(h.vertex_set()));
    doc.insert("terminals".into(), json!(h.terminal_set()));
    doc.insert("edges".into(), Value::Array(edges));
    doc.insert("provenance".into(), provenance);
    if let Some(cert) = certificate {
        doc.insert("certificate".into(), cert);
    }
    Value::Object(doc)
}

fn string_list(value: &Value, field: &str) -> Result<Vec<String>, FormatError> {
    value
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::Structure(format!("sparsifier is missing `{field}`")))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| FormatError::Structure(format!("`{field}` holds a non-string")))
        })
        .collect()
}

fn integer_field(edge: &Value, field: &str) -> Result<num::BigInt, FormatError> {
    let raw = edge
        .get(field)
        .ok_or_else(|| FormatError::Structure(format!("edge is missing `{field}`")))?;
    let text = match raw {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(FormatError::Structure(format!("edge `{field}` must be a number"))),
    };
    text.parse::<num::BigInt>()
        .map_err(|_| FormatError::Structure(format!("edge `{field}` is not an integer: {text}")))
}

/// Read a sparsifier document back into a graph; provenance and any
/// certificate are ignored here, callers recompute what they need.
pub fn parse_sparsifier(text: &str) -> Result<CapacitatedGraph, FormatError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| FormatError::Structure(format!("bad sparsifier JSON: {e}")))?;
    let vertices = string_list(&doc, "vertices")?;
    let terminals = string_list(&doc, "terminals")?;
    let raw_edges = doc
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::Structure("sparsifier is missing `edges`".into()))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for edge in raw_edges {
        let u = edge
            .get("u")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::Structure("edge is missing `u`".into()))?;
        let v = edge
            .get("v")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::Structure("edge is missing `v`".into()))?;
        let num = integer_field(edge, "num")?;
        let den = integer_field(edge, "den")?;
        if den == num::BigInt::from(0) {
            return Err(FormatError::Structure("edge has denominator zero".into()));
        }
        edges.push((u.to_owned(), v.to_owned(), Rational::new(num, den)));
    }
    CapacitatedGraph::new(vertices, terminals, edges)
        .map_err(|e| FormatError::Structure(e.to_string()))
}

/// Instance text or sparsifier JSON, decided by the leading byte.
pub fn parse_graph_auto(text: &str) -> Result<CapacitatedGraph, FormatError> {
    if text.trim_start().starts_with('{') {
        parse_sparsifier(text)
    } else {
        parse_instance(text)
    }
}

fn rational_json(c: &Rational) -> Value {
    let (num, den, approx) = rational_fields(c);
    json!({ "num": num, "den": den, "approx": approx })
}

fn vertex_set_json(side: &BTreeSet<String>) -> Value {
    json!(side)
}

pub fn quality_report_json(report: &QualityReport) -> Value {
    let mut doc = Map::new();
    doc.insert("kind".into(), json!("cut"));
    doc.insert("minRatio".into(), rational_json(&report.min_ratio));
    doc.insert("maxRatio".into(), rational_json(&report.max_ratio));
    doc.insert("witnessMin".into(), vertex_set_json(&report.witness_min));
    doc.insert("witnessMax".into(), vertex_set_json(&report.witness_max));
    if let Some(rows) = &report.table {
        let table: Vec<Value> = rows
            .iter()
            .map(|row| {
                json!({
                    "side": row.side,
                    "baseMincut": rational_json(&row.base_mincut),
                    "sparsifierCut": rational_json(&row.sparsifier_cut),
                    "ratio": rational_json(&row.ratio),
                })
            })
            .collect();
        doc.insert("table".into(), Value::Array(table));
    }
    Value::Object(doc)
}

pub fn flow_certificate_json(cert: &FlowCertificate) -> Value {
    let congestion: Vec<Value> = cert
        .congestion
        .iter()
        .map(|((u, v), c)| json!({ "u": u, "v": v, "congestion": rational_json(c) }))
        .collect();
    json!({
        "kind": "flow-tree",
        "quality": rational_json(&cert.quality),
        "bottleneck": cert
            .bottleneck
            .as_ref()
            .map(|(u, v)| json!({ "u": u, "v": v }))
            .unwrap_or(Value::Null),
        "congestion": congestion,
    })
}

pub fn exactness_json(report: &ExactnessReport) -> Value {
    json!({
        "kind": "exact",
        "exact": report.exact,
        "cutWitness": report
            .cut_witness
            .as_ref()
            .map(vertex_set_json)
            .unwrap_or(Value::Null),
        "flowWitness": report
            .flow_witness
            .as_ref()
            .map(|(index, gap)| json!({ "demand": index, "gap": rational_json(gap) }))
            .unwrap_or(Value::Null),
    })
}
