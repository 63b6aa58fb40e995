//! Line-oriented text format for graph sequences.
//!
//! ```text
//! # comment
//! H directed
//! N a 1
//! N b 2
//! E a b
//! ```
//!
//! `N <id> <time>` declares a node, `E <u> <v>` an edge whose time is the
//! later of its endpoint times. Records may appear in any order; the loader
//! groups them into arrival batches. Ids cannot contain whitespace.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::graph::{Batch, GraphError, GraphSequence};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// When set, a time stamp `y` is mapped to `max(y - origin + 1, 1)`, so
    /// the origin becomes step 1 and anything earlier (e.g. a sentinel year
    /// for unknown arrival times) joins step 1 as well.
    pub time_origin: Option<i64>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

pub fn parse_edge_list(text: &str, opts: &LoadOptions) -> Result<GraphSequence, GraphError> {
    let mut directed = None;
    let mut nodes: Vec<(String, usize)> = Vec::new();
    let mut edges: Vec<(String, String, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["H", mode] => {
                if directed.is_some() {
                    return Err(parse_err(lineno, "header declared twice"));
                }
                directed = Some(match *mode {
                    "directed" => true,
                    "undirected" => false,
                    other => return Err(parse_err(lineno, format!("unknown mode `{other}`"))),
                });
            }
            ["N", id, time] => {
                let raw_t: i64 = time
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad time `{time}`")))?;
                let t = match opts.time_origin {
                    Some(origin) => (raw_t - origin + 1).max(1),
                    None if raw_t >= 1 => raw_t,
                    None => return Err(parse_err(lineno, format!("time {raw_t} is before step 1"))),
                };
                nodes.push((id.to_string(), t as usize));
            }
            ["E", u, v] => edges.push((u.to_string(), v.to_string(), lineno)),
            _ => return Err(parse_err(lineno, format!("unrecognised record `{line}`"))),
        }
        if directed.is_none() {
            return Err(parse_err(lineno, "missing `H directed|undirected` header"));
        }
    }
    let directed = directed.ok_or_else(|| parse_err(0, "missing `H directed|undirected` header"))?;

    let horizon = nodes.iter().map(|&(_, t)| t).max().unwrap_or(0);
    let mut batches = vec![Batch::default(); horizon];
    let mut time_of: HashMap<&str, usize> = HashMap::with_capacity(nodes.len());
    for (id, t) in &nodes {
        if time_of.insert(id.as_str(), *t).is_some() {
            return Err(GraphError::DuplicateNode(id.clone()));
        }
        batches[t - 1].nodes.push(id.clone());
    }
    for (u, v, _) in &edges {
        let lookup = |node: &String| {
            time_of
                .get(node.as_str())
                .copied()
                .ok_or_else(|| GraphError::DanglingEdge {
                    u: u.clone(),
                    v: v.clone(),
                    node: node.clone(),
                })
        };
        let t = lookup(u)?.max(lookup(v)?);
        batches[t - 1].edges.push((u.clone(), v.clone()));
    }
    GraphSequence::from_batches(directed, &batches)
}

/// Serializes batch by batch; parsing the output reproduces the sequence.
pub fn write_edge_list(seq: &GraphSequence) -> String {
    let mut out = String::new();
    let mode = if seq.is_directed() { "directed" } else { "undirected" };
    writeln!(out, "H {mode}").unwrap();
    for t in 1..=seq.horizon() {
        for v in seq.batch_nodes(t) {
            writeln!(out, "N {} {t}", seq.node_id(v)).unwrap();
        }
        for &(u, v) in seq.batch_edges(t) {
            writeln!(out, "E {} {}", seq.node_id(u), seq.node_id(v)).unwrap();
        }
    }
    out
}
