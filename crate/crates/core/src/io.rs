//! Problem files and JSON report envelopes.
//!
//! Problem format, one directive per line, `#` starts a comment:
//!
//! ```text
//! n 4                  # vertex count, first directive
//! kind combinatorial   # or `normalized`; optional, defaults to combinatorial
//! e 0 1 1.0            # edge u v w
//! p 3 9.0              # potential W_u (diagonal entry for Hermitian files)
//! z 0 1 0.0 1.0        # Hermitian off-diagonal entry H_uv = re + i im
//! ```
//!
//! Files with `z` lines describe a Hermitian matrix directly and may not
//! contain `e` lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{
    DiagonalPotential, HamiltonianDecomposition, LaplacianKind, SignedWeightedGraph,
};
use crate::stoquastic::HermitianMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Decomposition(HamiltonianDecomposition),
    Hermitian(HermitianMatrix),
}

impl Problem {
    pub fn vertex_count(&self) -> usize {
        match self {
            Problem::Decomposition(d) => d.vertex_count(),
            Problem::Hermitian(h) => h.dim(),
        }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body
            .char_indices()
            .chain(std::iter::once((body.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push((body[..s].chars().count() + 1, &body[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: i + 1,
                tokens,
            });
        }
    }
    out
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn expect_arity(line: &Line<'_>, arity: usize) -> Result<()> {
    if line.tokens.len() != arity + 1 {
        let col = line
            .tokens
            .get(arity + 1)
            .map_or(line.tokens.last().unwrap().0, |t| t.0);
        return Err(syntax(
            line.number,
            col,
            format!(
                "`{}` takes {arity} arguments, found {}",
                line.tokens[0].1,
                line.tokens.len() - 1
            ),
        ));
    }
    Ok(())
}

fn parse_vertex(line: &Line<'_>, idx: usize, n: usize) -> Result<usize> {
    let (col, tok) = line.tokens[idx];
    let v: usize = tok.parse().map_err(|_| {
        syntax(
            line.number,
            col,
            format!("expected a vertex id, found `{tok}`"),
        )
    })?;
    if v >= n {
        return Err(syntax(
            line.number,
            col,
            format!("vertex {v} out of range 0..{n}"),
        ));
    }
    Ok(v)
}

fn parse_real(line: &Line<'_>, idx: usize) -> Result<f64> {
    let (col, tok) = line.tokens[idx];
    match tok.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(syntax(
            line.number,
            col,
            format!("expected a finite number, found `{tok}`"),
        )),
    }
}

/// Parses a problem file into a decomposition or a Hermitian matrix.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let lines = tokenize(text);
    let Some(first) = lines.first() else {
        return Err(Error::BadHeader {
            line: 1,
            msg: "empty file; expected `n <count>`".into(),
        });
    };
    if first.tokens[0].1 != "n" {
        return Err(Error::BadHeader {
            line: first.number,
            msg: format!("expected `n <count>`, found `{}`", first.tokens[0].1),
        });
    }
    if first.tokens.len() != 2 {
        return Err(Error::BadHeader {
            line: first.number,
            msg: "`n` takes exactly one argument".into(),
        });
    }
    let n: usize = match first.tokens[1].1.parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return Err(Error::BadHeader {
                line: first.number,
                msg: format!(
                    "vertex count must be a positive integer, found `{}`",
                    first.tokens[1].1
                ),
            })
        }
    };

    let mut kind: Option<LaplacianKind> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut complex: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut potential = vec![0.0; n];
    let mut potential_seen = vec![false; n];
    let mut first_edge_line = None;
    let mut first_complex_line = None;

    for line in &lines[1..] {
        let (col, directive) = line.tokens[0];
        match directive {
            "n" => {
                return Err(Error::BadHeader {
                    line: line.number,
                    msg: "vertex count given twice".into(),
                })
            }
            "kind" => {
                expect_arity(line, 1)?;
                if kind.is_some() {
                    return Err(Error::BadHeader {
                        line: line.number,
                        msg: "kind given twice".into(),
                    });
                }
                kind = Some(line.tokens[1].1.parse().map_err(|_| Error::BadHeader {
                    line: line.number,
                    msg: format!("unknown kind `{}`", line.tokens[1].1),
                })?);
            }
            "e" | "z" => {
                let arity = if directive == "e" { 3 } else { 4 };
                expect_arity(line, arity)?;
                let u = parse_vertex(line, 1, n)?;
                let v = parse_vertex(line, 2, n)?;
                if u == v {
                    return Err(Error::ParseSelfLoop {
                        line: line.number,
                        vertex: u,
                    });
                }
                let key = (u.min(v), u.max(v));
                if !seen.insert(key) {
                    return Err(Error::ParseDuplicateEdge {
                        line: line.number,
                        u: key.0,
                        v: key.1,
                    });
                }
                if directive == "e" {
                    first_edge_line.get_or_insert(line.number);
                    edges.push((u, v, parse_real(line, 3)?));
                } else {
                    first_complex_line.get_or_insert(line.number);
                    let z = Complex64::new(parse_real(line, 3)?, parse_real(line, 4)?);
                    // Store as H_{min,max}.
                    complex.push(if u < v { (u, v, z) } else { (v, u, z.conj()) });
                }
            }
            "p" => {
                expect_arity(line, 2)?;
                let u = parse_vertex(line, 1, n)?;
                if potential_seen[u] {
                    return Err(syntax(
                        line.number,
                        line.tokens[1].0,
                        format!("potential for vertex {u} given twice"),
                    ));
                }
                potential_seen[u] = true;
                potential[u] = parse_real(line, 2)?;
            }
            other => {
                return Err(syntax(
                    line.number,
                    col,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    if let (Some(_), Some(zl)) = (first_edge_line, first_complex_line) {
        return Err(syntax(
            zl,
            1,
            "`z` entries cannot be combined with `e` edges",
        ));
    }
    if first_complex_line.is_some() {
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (u, &w) in potential.iter().enumerate() {
            m[(u, u)] = Complex64::new(w, 0.0);
        }
        for (u, v, z) in complex {
            m[(u, v)] = z;
            m[(v, u)] = z.conj();
        }
        return Ok(Problem::Hermitian(HermitianMatrix::new(m)?));
    }
    let graph = SignedWeightedGraph::from_edges(n, edges)?;
    let decomp = HamiltonianDecomposition::new(
        graph,
        kind.unwrap_or(LaplacianKind::Combinatorial),
        DiagonalPotential(potential),
    )?;
    Ok(Problem::Decomposition(decomp))
}

/// Canonical text: header, edges sorted by `(u, v)` with `u < v`, then the
/// nonzero potentials in vertex order. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn serialize_decomposition(decomp: &HamiltonianDecomposition) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", decomp.vertex_count()).unwrap();
    writeln!(out, "kind {}", decomp.kind.as_str()).unwrap();
    for &(u, v, w) in decomp.graph.edges() {
        writeln!(out, "e {u} {v} {w:?}").unwrap();
    }
    for (u, &w) in decomp.potential.values().iter().enumerate() {
        if w != 0.0 {
            writeln!(out, "p {u} {w:?}").unwrap();
        }
    }
    out
}

pub fn serialize_hermitian(h: &HermitianMatrix) -> String {
    let m = h.matrix();
    let n = h.dim();
    let mut out = String::new();
    writeln!(out, "n {n}").unwrap();
    for u in 0..n {
        let d = m[(u, u)].re;
        if d != 0.0 {
            writeln!(out, "p {u} {d:?}").unwrap();
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            let z = m[(u, v)];
            if z.re != 0.0 || z.im != 0.0 {
                writeln!(out, "z {u} {v} {:?} {:?}", z.re, z.im).unwrap();
            }
        }
    }
    out
}

pub fn serialize_problem(problem: &Problem) -> String {
    match problem {
        Problem::Decomposition(d) => serialize_decomposition(d),
        Problem::Hermitian(h) => serialize_hermitian(h),
    }
}

/// `sha256:<hex>` of the raw input bytes.
pub fn input_digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Versioned JSON report wrapping any number of typed payloads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub payloads: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl ReportEnvelope {
    pub fn new(input_digest: String) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            tool: "gapcert".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_digest,
            payloads: Vec::new(),
            timings: None,
        }
    }

    /// Appends `{"kind": kind, "data": payload}`.
    pub fn push<T: Serialize>(&mut self, kind: &str, payload: &T) -> Result<()> {
        let data =
            serde_json::to_value(payload).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), serde_json::Value::String(kind.into()));
        obj.insert("data".into(), data);
        self.payloads.push(serde_json::Value::Object(obj));
        Ok(())
    }

    pub fn record_timing(&mut self, label: &str, seconds: f64) {
        self.timings
            .get_or_insert_with(BTreeMap::new)
            .insert(label.into(), seconds);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}
