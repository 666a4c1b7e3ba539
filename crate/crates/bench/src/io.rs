//! Plain-text instance files.
//!
//! Graph file: a header line `n m`, then `m` lines `tail head [length]`.
//! Observation file: `n` lines `vertex y [w]` with `w` defaulting to 1.
//! Blank lines and lines starting with `#` are ignored in both.

use std::fmt::Write as _;
use std::path::Path;

use dagiso::{Dag, Edge};

use crate::error::{BenchError, Result};

/// A parsed instance in the caller's units.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceData {
    pub dag: Dag,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

fn parse_err(file: &str, line: usize, msg: impl Into<String>) -> BenchError {
    BenchError::Parse {
        file: file.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Numbered lines that carry content.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(file: &str, line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(file, line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(file, line, format!("malformed {what} `{tok}`")))
}

pub fn parse_graph(text: &str, file: &str) -> Result<Dag> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(file, 1, "missing header `n m`"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(file, hl, toks.next(), "vertex count")?;
    let m: usize = field(file, hl, toks.next(), "edge count")?;
    if toks.next().is_some() {
        return Err(parse_err(file, hl, "header has extra fields"));
    }
    let mut edges = Vec::with_capacity(m);
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        if edges.len() == m {
            return Err(parse_err(file, ln, format!("more than {m} edge lines")));
        }
        let mut toks = l.split_whitespace();
        let tail: usize = field(file, ln, toks.next(), "tail")?;
        let head: usize = field(file, ln, toks.next(), "head")?;
        let length: f64 = match toks.next() {
            Some(t) => field(file, ln, Some(t), "length")?,
            None => 1.0,
        };
        if toks.next().is_some() {
            return Err(parse_err(file, ln, "edge line has extra fields"));
        }
        if tail >= n || head >= n {
            return Err(parse_err(file, ln, format!("vertex out of range for n = {n}")));
        }
        if !(length >= 0.0) {
            return Err(parse_err(file, ln, format!("malformed length `{length}`")));
        }
        edges.push(Edge::with_length(tail, head, length));
    }
    if edges.len() != m {
        return Err(parse_err(file, last, format!("expected {m} edges, found {}", edges.len())));
    }
    Ok(Dag::new(n, edges)?)
}

pub fn parse_observations(text: &str, n: usize, file: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut y = vec![f64::NAN; n];
    let mut w = vec![1.0f64; n];
    let mut seen = vec![false; n];
    let mut last = 0;
    for (ln, l) in content_lines(text) {
        last = ln;
        let mut toks = l.split_whitespace();
        let v: usize = field(file, ln, toks.next(), "vertex")?;
        if v >= n {
            return Err(parse_err(file, ln, format!("vertex {v} out of range for n = {n}")));
        }
        if seen[v] {
            return Err(parse_err(file, ln, format!("duplicate row for vertex {v}")));
        }
        seen[v] = true;
        y[v] = field(file, ln, toks.next(), "observation")?;
        if !y[v].is_finite() {
            return Err(parse_err(file, ln, "observation is not finite"));
        }
        if let Some(t) = toks.next() {
            w[v] = field(file, ln, Some(t), "weight")?;
            if !(w[v] > 0.0 && w[v].is_finite()) {
                return Err(parse_err(file, ln, "weight must be positive"));
            }
        }
        if toks.next().is_some() {
            return Err(parse_err(file, ln, "observation line has extra fields"));
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(parse_err(file, last.max(1), format!("no observation for vertex {v}")));
    }
    Ok((y, w))
}

pub fn parse_instance_str(graph: &str, obs: &str) -> Result<InstanceData> {
    let dag = parse_graph(graph, "graph")?;
    let (y, w) = parse_observations(obs, dag.n(), "observations")?;
    Ok(InstanceData { dag, y, w })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))
}

pub fn parse_instance(graph: &Path, obs: &Path) -> Result<InstanceData> {
    let (gt, ot) = (read(graph)?, read(obs)?);
    let dag = parse_graph(&gt, &graph.display().to_string())?;
    let (y, w) = parse_observations(&ot, dag.n(), &obs.display().to_string())?;
    Ok(InstanceData { dag, y, w })
}

/// Round-trips through [`parse_graph`] bit for bit (`{:?}` prints the
/// shortest exact representation).
pub fn serialize_graph(dag: &Dag) -> String {
    let mut s = format!("{} {}\n", dag.n(), dag.m());
    for e in dag.edges() {
        writeln!(s, "{} {} {:?}", e.tail, e.head, e.length).unwrap();
    }
    s
}

pub fn serialize_observations(y: &[f64], w: &[f64]) -> String {
    let mut s = String::new();
    for (v, (yv, wv)) in y.iter().zip(w).enumerate() {
        writeln!(s, "{v} {yv:?} {wv:?}").unwrap();
    }
    s
}

pub fn write_instance(data: &InstanceData, graph: &Path, obs: &Path) -> Result<()> {
    std::fs::write(graph, serialize_graph(&data.dag)).map_err(|e| BenchError::io(graph, e))?;
    std::fs::write(obs, serialize_observations(&data.y, &data.w)).map_err(|e| BenchError::io(obs, e))
}
