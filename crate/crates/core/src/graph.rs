//! Online graph sequences and their snapshots.
//!
//! A [`GraphSequence`] is built one arrival batch at a time. At step `t` a set
//! of fresh nodes arrives together with edges that touch at least one of them;
//! the other endpoint may be any node that arrived earlier. Snapshots `G_t`
//! are prefixes of the arrival order, so every snapshot is cheap to rebuild.
//!
//! Node ids are opaque strings. Internally nodes are indexed in
//! `(time stamp, id)` order, which is also the deterministic iteration order of
//! every [`GraphView`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a node inside a sequence (and inside every snapshot of it).
pub type NodeIx = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("step {got} does not follow the current horizon {horizon}")]
    NonSequentialStep { horizon: usize, got: usize },
    #[error("node `{0}` is declared more than once")]
    DuplicateNode(String),
    #[error("edge ({u}, {v}) at step {t} touches `{node}`, which arrives later")]
    EdgeToFutureNode {
        u: String,
        v: String,
        node: String,
        t: usize,
    },
    #[error("edge ({u}, {v}) references undeclared node `{node}`")]
    DanglingEdge { u: String, v: String, node: String },
    #[error("edge ({u}, {v}) at step {t} has no endpoint arriving at that step")]
    StaleEdge { u: String, v: String, t: usize },
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("time step {t} is outside 1..={horizon}")]
    TimeOutOfRange { t: usize, horizon: usize },
    #[error("degree bounds do not match the directedness of the graph")]
    ModeMismatch,
    #[error("degree bounds must be at least 1")]
    InvalidBound,
    #[error("cannot coarsen a sequence of {horizon} steps into {releases} releases")]
    InvalidReleaseCount { horizon: usize, releases: usize },
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Public a-priori degree bound defining the domain of admissible sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DegreeBounds {
    Undirected { d: usize },
    Directed { d_in: usize, d_out: usize },
}

impl DegreeBounds {
    pub fn undirected(d: usize) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::InvalidBound);
        }
        Ok(DegreeBounds::Undirected { d })
    }

    pub fn directed(d_in: usize, d_out: usize) -> Result<Self, GraphError> {
        if d_in == 0 || d_out == 0 {
            return Err(GraphError::InvalidBound);
        }
        Ok(DegreeBounds::Directed { d_in, d_out })
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, DegreeBounds::Directed { .. })
    }
}

impl fmt::Display for DegreeBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeBounds::Undirected { d } => write!(f, "D={d}"),
            DegreeBounds::Directed { d_in, d_out } => write!(f, "D_in={d_in},D_out={d_out}"),
        }
    }
}

impl std::str::FromStr for DegreeBounds {
    type Err = GraphError;

    /// `D` for undirected bounds, `D_in:D_out` for directed ones.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |x: &str| {
            x.trim().parse::<usize>().map_err(|_| GraphError::Parse {
                line: 0,
                msg: format!("bad degree bound `{s}`"),
            })
        };
        match s.split_once(':') {
            Some((a, b)) => DegreeBounds::directed(num(a)?, num(b)?),
            None => DegreeBounds::undirected(num(s)?),
        }
    }
}

/// Which degree counter a bound violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeKind {
    Total,
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundViolation {
    pub t: usize,
    pub node: String,
    pub kind: DegreeKind,
    pub degree: usize,
}

impl fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DegreeKind::Total => "degree",
            DegreeKind::In => "in-degree",
            DegreeKind::Out => "out-degree",
        };
        write!(
            f,
            "node `{}` reaches {kind} {} at step {}",
            self.node, self.degree, self.t
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsVerdict {
    Ok,
    Violation(BoundViolation),
}

impl BoundsVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, BoundsVerdict::Ok)
    }
}

/// One arrival batch described by node ids, as handed to
/// [`GraphSequence::from_batches`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Batch {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl Batch {
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Self {
        Batch {
            nodes: nodes.iter().map(|s| s.as_ref().to_string()).collect(),
            edges: edges
                .iter()
                .map(|(u, v)| (u.as_ref().to_string(), v.as_ref().to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphSequence {
    directed: bool,
    names: Arc<Vec<String>>,
    times: Vec<usize>,
    index: HashMap<String, NodeIx>,
    /// Undirected edges are stored as (smaller id, larger id).
    edges: Vec<(NodeIx, NodeIx)>,
    edge_set: HashSet<(NodeIx, NodeIx)>,
    /// `node_ends[t - 1]` is `|V_t|`; `edge_ends[t - 1]` is `|E_t|`.
    node_ends: Vec<usize>,
    edge_ends: Vec<usize>,
}

impl GraphSequence {
    pub fn new(directed: bool) -> Self {
        GraphSequence {
            directed,
            names: Arc::new(Vec::new()),
            times: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            edge_set: HashSet::new(),
            node_ends: Vec::new(),
            edge_ends: Vec::new(),
        }
    }

    /// Builds a sequence from complete batches, where batch `i` holds the
    /// arrivals of step `i + 1`. Unlike repeated [`ingest_step`] calls this
    /// sees the whole sequence, so an edge to a node declared in a later batch
    /// is reported as [`GraphError::EdgeToFutureNode`].
    ///
    /// [`ingest_step`]: GraphSequence::ingest_step
    pub fn from_batches(directed: bool, batches: &[Batch]) -> Result<Self, GraphError> {
        let mut declared: HashMap<&str, usize> = HashMap::new();
        for (i, batch) in batches.iter().enumerate() {
            for node in &batch.nodes {
                if declared.insert(node.as_str(), i + 1).is_some() {
                    return Err(GraphError::DuplicateNode(node.clone()));
                }
            }
        }
        for (i, batch) in batches.iter().enumerate() {
            let t = i + 1;
            for (u, v) in &batch.edges {
                for node in [u, v] {
                    match declared.get(node.as_str()) {
                        None => {
                            return Err(GraphError::DanglingEdge {
                                u: u.clone(),
                                v: v.clone(),
                                node: node.clone(),
                            })
                        }
                        Some(&nt) if nt > t => {
                            return Err(GraphError::EdgeToFutureNode {
                                u: u.clone(),
                                v: v.clone(),
                                node: node.clone(),
                                t,
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
        let mut seq = GraphSequence::new(directed);
        for (i, batch) in batches.iter().enumerate() {
            seq.ingest_step(i + 1, &batch.nodes, &batch.edges)?;
        }
        Ok(seq)
    }

    /// Appends the arrivals of step `t = horizon + 1`. The batch is validated
    /// as a whole before anything is recorded.
    pub fn ingest_step<S: AsRef<str>>(&mut self, t: usize, nodes: &[S], edges: &[(S, S)]) -> Result<(), GraphError> {
        if t != self.horizon() + 1 {
            return Err(GraphError::NonSequentialStep {
                horizon: self.horizon(),
                got: t,
            });
        }
        let mut fresh: Vec<&str> = Vec::with_capacity(nodes.len());
        let mut fresh_set: HashSet<&str> = HashSet::with_capacity(nodes.len());
        for node in nodes {
            let id = node.as_ref();
            if self.index.contains_key(id) || !fresh_set.insert(id) {
                return Err(GraphError::DuplicateNode(id.to_string()));
            }
            fresh.push(id);
        }
        fresh.sort_unstable();

        let base = self.names.len();
        let lookup = |id: &str| -> Option<NodeIx> {
            self.index
                .get(id)
                .copied()
                .or_else(|| fresh.binary_search(&id).ok().map(|p| base + p))
        };

        let mut batch_edges = Vec::with_capacity(edges.len());
        let mut batch_set = HashSet::with_capacity(edges.len());
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(GraphError::SelfLoop(u.to_string()));
            }
            let dangling = |node: &str| GraphError::DanglingEdge {
                u: u.to_string(),
                v: v.to_string(),
                node: node.to_string(),
            };
            let ui = lookup(u).ok_or_else(|| dangling(u))?;
            let vi = lookup(v).ok_or_else(|| dangling(v))?;
            if ui < base && vi < base {
                return Err(GraphError::StaleEdge {
                    u: u.to_string(),
                    v: v.to_string(),
                    t,
                });
            }
            let key = if self.directed || u < v { (ui, vi) } else { (vi, ui) };
            if self.edge_set.contains(&key) || !batch_set.insert(key) {
                return Err(GraphError::DuplicateEdge(u.to_string(), v.to_string()));
            }
            batch_edges.push(key);
        }

        let names = Arc::make_mut(&mut self.names);
        for (p, id) in fresh.iter().enumerate() {
            names.push((*id).to_string());
            self.index.insert((*id).to_string(), base + p);
            self.times.push(t);
        }
        self.edge_set.extend(batch_edges.iter().copied());
        self.edges.extend(batch_edges);
        self.node_ends.push(self.names.len());
        self.edge_ends.push(self.edges.len());
        Ok(())
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of ingested time steps `T`.
    pub fn horizon(&self) -> usize {
        self.node_ends.len()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, v: NodeIx) -> &str {
        &self.names[v]
    }

    pub fn node_index(&self, id: &str) -> Option<NodeIx> {
        self.index.get(id).copied()
    }

    /// Arrival time stamp of a node.
    pub fn node_time(&self, v: NodeIx) -> usize {
        self.times[v]
    }

    /// All edges in arrival order as index pairs.
    pub fn edges(&self) -> &[(NodeIx, NodeIx)] {
        &self.edges
    }

    /// Arrival step of the edge stored at `position` in [`edges`](Self::edges).
    pub fn edge_time(&self, position: usize) -> usize {
        self.edge_ends.partition_point(|&end| end <= position) + 1
    }

    /// Index range of `∂V_t`.
    pub fn batch_nodes(&self, t: usize) -> std::ops::Range<NodeIx> {
        let start = if t > 1 { self.node_ends[t - 2] } else { 0 };
        start..self.node_ends[t - 1]
    }

    /// `∂E_t` in the order it was ingested.
    pub fn batch_edges(&self, t: usize) -> &[(NodeIx, NodeIx)] {
        let start = if t > 1 { self.edge_ends[t - 2] } else { 0 };
        &self.edges[start..self.edge_ends[t - 1]]
    }

    /// Re-expresses the sequence as id-based batches.
    pub fn to_batches(&self) -> Vec<Batch> {
        (1..=self.horizon())
            .map(|t| Batch {
                nodes: self.batch_nodes(t).map(|v| self.names[v].clone()).collect(),
                edges: self
                    .batch_edges(t)
                    .iter()
                    .map(|&(u, v)| (self.names[u].clone(), self.names[v].clone()))
                    .collect(),
            })
            .collect()
    }

    /// The snapshot `G_t`.
    pub fn snapshot(&self, t: usize) -> Result<GraphView, GraphError> {
        if t == 0 || t > self.horizon() {
            return Err(GraphError::TimeOutOfRange {
                t,
                horizon: self.horizon(),
            });
        }
        Ok(GraphView::from_indexed(
            self.directed,
            Arc::clone(&self.names),
            self.node_ends[t - 1],
            &self.edges[..self.edge_ends[t - 1]],
        ))
    }

    /// All snapshots `G_1, …, G_T` in order.
    pub fn snapshots(&self) -> Vec<GraphView> {
        (1..=self.horizon())
            .map(|t| self.snapshot(t).expect("t within horizon"))
            .collect()
    }

    /// The prefix sequence `(G_1, …, G_t)`.
    pub fn truncate(&self, t: usize) -> Result<GraphSequence, GraphError> {
        if t > self.horizon() {
            return Err(GraphError::TimeOutOfRange {
                t,
                horizon: self.horizon(),
            });
        }
        let mut batches = self.to_batches();
        batches.truncate(t);
        GraphSequence::from_batches(self.directed, &batches)
    }

    /// Undirected version obtained by ignoring edge directions; a pair of
    /// opposite arcs collapses into one edge.
    pub fn to_undirected(&self) -> GraphSequence {
        if !self.directed {
            return self.clone();
        }
        let mut seen = HashSet::new();
        let batches: Vec<Batch> = self
            .to_batches()
            .into_iter()
            .map(|b| Batch {
                nodes: b.nodes,
                edges: b
                    .edges
                    .into_iter()
                    .filter(|(u, v)| {
                        let key = if u < v {
                            (u.clone(), v.clone())
                        } else {
                            (v.clone(), u.clone())
                        };
                        seen.insert(key)
                    })
                    .collect(),
            })
            .collect();
        GraphSequence::from_batches(false, &batches).expect("undirected projection of a valid sequence")
    }

    /// Merges consecutive steps so that the sequence has exactly `releases`
    /// steps. Step `t` is mapped to `⌈t · releases / T⌉`.
    pub fn coarsen(&self, releases: usize) -> Result<GraphSequence, GraphError> {
        let horizon = self.horizon();
        if releases == 0 || releases > horizon {
            return Err(GraphError::InvalidReleaseCount { horizon, releases });
        }
        let mut batches = vec![Batch::default(); releases];
        for (t, batch) in self.to_batches().into_iter().enumerate() {
            let target = ((t + 1) * releases).div_ceil(horizon) - 1;
            batches[target].nodes.extend(batch.nodes);
            batches[target].edges.extend(batch.edges);
        }
        GraphSequence::from_batches(self.directed, &batches)
    }

    /// Checks the sequence against `bounds`. Degrees never decrease along a
    /// sequence, so replaying the edges in arrival order finds the first step
    /// at which any snapshot leaves the bounded domain.
    pub fn verify_bounds(&self, bounds: &DegreeBounds) -> Result<BoundsVerdict, GraphError> {
        let n = self.node_count();
        match (*bounds, self.directed) {
            (DegreeBounds::Undirected { d }, false) => {
                let mut deg = vec![0usize; n];
                for (pos, &(u, v)) in self.edges.iter().enumerate() {
                    for w in [u, v] {
                        deg[w] += 1;
                        if deg[w] > d {
                            return Ok(self.violation(pos, w, DegreeKind::Total, deg[w]));
                        }
                    }
                }
                Ok(BoundsVerdict::Ok)
            }
            (DegreeBounds::Directed { d_in, d_out }, true) => {
                let mut outd = vec![0usize; n];
                let mut ind = vec![0usize; n];
                for (pos, &(u, v)) in self.edges.iter().enumerate() {
                    outd[u] += 1;
                    if outd[u] > d_out {
                        return Ok(self.violation(pos, u, DegreeKind::Out, outd[u]));
                    }
                    ind[v] += 1;
                    if ind[v] > d_in {
                        return Ok(self.violation(pos, v, DegreeKind::In, ind[v]));
                    }
                }
                Ok(BoundsVerdict::Ok)
            }
            _ => Err(GraphError::ModeMismatch),
        }
    }

    fn violation(&self, position: usize, node: NodeIx, kind: DegreeKind, degree: usize) -> BoundsVerdict {
        BoundsVerdict::Violation(BoundViolation {
            t: self.edge_time(position),
            node: self.names[node].clone(),
            kind,
            degree,
        })
    }

    /// Largest degree over the whole sequence, as `(max_in, max_out)` for
    /// directed sequences and `(max, max)` for undirected ones.
    pub fn max_degrees(&self) -> (usize, usize) {
        let n = self.node_count();
        let mut outd = vec![0usize; n];
        let mut ind = vec![0usize; n];
        for &(u, v) in &self.edges {
            outd[u] += 1;
            ind[v] += 1;
        }
        if self.directed {
            (
                ind.iter().copied().max().unwrap_or(0),
                outd.iter().copied().max().unwrap_or(0),
            )
        } else {
            let m = (0..n).map(|v| outd[v] + ind[v]).max().unwrap_or(0);
            (m, m)
        }
    }
}

/// An immutable graph, usually a snapshot of a [`GraphSequence`].
///
/// Adjacency lists are sorted by node index. For directed graphs `out_adj`
/// and `in_adj` hold successors and predecessors; for undirected graphs only
/// `out_adj` is populated and holds all neighbours.
#[derive(Debug, Clone)]
pub struct GraphView {
    directed: bool,
    names: Arc<Vec<String>>,
    n: usize,
    out_adj: Vec<Vec<NodeIx>>,
    in_adj: Vec<Vec<NodeIx>>,
    edge_count: usize,
    projected: bool,
}

impl GraphView {
    pub(crate) fn from_indexed(directed: bool, names: Arc<Vec<String>>, n: usize, edges: &[(NodeIx, NodeIx)]) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = if directed { vec![Vec::new(); n] } else { Vec::new() };
        for &(u, v) in edges {
            out_adj[u].push(v);
            if directed {
                in_adj[v].push(u);
            } else {
                out_adj[v].push(u);
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        GraphView {
            directed,
            names,
            n,
            out_adj,
            in_adj,
            edge_count: edges.len(),
            projected: false,
        }
    }

    /// Builds a standalone view; nodes are indexed in the order given.
    pub fn from_edge_list<S: AsRef<str>>(directed: bool, nodes: &[S], edges: &[(S, S)]) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(nodes.len());
        let mut names = Vec::with_capacity(nodes.len());
        for node in nodes {
            let id = node.as_ref();
            if index.insert(id.to_string(), names.len()).is_some() {
                return Err(GraphError::DuplicateNode(id.to_string()));
            }
            names.push(id.to_string());
        }
        let mut seen = HashSet::new();
        let mut pairs = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(GraphError::SelfLoop(u.to_string()));
            }
            let find = |node: &str| {
                index.get(node).copied().ok_or_else(|| GraphError::DanglingEdge {
                    u: u.to_string(),
                    v: v.to_string(),
                    node: node.to_string(),
                })
            };
            let (ui, vi) = (find(u)?, find(v)?);
            let key = if directed || ui < vi { (ui, vi) } else { (vi, ui) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(u.to_string(), v.to_string()));
            }
            pairs.push(key);
        }
        let n = names.len();
        Ok(GraphView::from_indexed(directed, Arc::new(names), n, &pairs))
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Whether this view is the output of a degree-bounding projection.
    pub fn is_projected(&self) -> bool {
        self.projected
    }

    pub(crate) fn mark_projected(mut self) -> Self {
        self.projected = true;
        self
    }

    pub(crate) fn names(&self) -> &Arc<Vec<String>> {
        &self.names
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> std::ops::Range<NodeIx> {
        0..self.n
    }

    pub fn node_id(&self, v: NodeIx) -> &str {
        &self.names[v]
    }

    /// Undirected degree. For directed views this is in-degree plus out-degree.
    pub fn degree(&self, v: NodeIx) -> usize {
        if self.directed {
            self.out_adj[v].len() + self.in_adj[v].len()
        } else {
            self.out_adj[v].len()
        }
    }

    pub fn out_degree(&self, v: NodeIx) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: NodeIx) -> usize {
        if self.directed {
            self.in_adj[v].len()
        } else {
            self.out_adj[v].len()
        }
    }

    /// Neighbours of an undirected node, successors of a directed one.
    pub fn neighbors(&self, v: NodeIx) -> &[NodeIx] {
        &self.out_adj[v]
    }

    pub fn out_neighbors(&self, v: NodeIx) -> &[NodeIx] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: NodeIx) -> &[NodeIx] {
        if self.directed {
            &self.in_adj[v]
        } else {
            &self.out_adj[v]
        }
    }

    pub fn has_edge(&self, u: NodeIx, v: NodeIx) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Every edge once; undirected edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIx, NodeIx)> + '_ {
        let directed = self.directed;
        self.out_adj.iter().enumerate().flat_map(move |(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| directed || u < v)
                .map(move |v| (u, v))
        })
    }

    /// Degree sequence used by degree statistics: out-degree when directed.
    pub fn stat_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.out_adj.iter().map(Vec::len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_ab() -> GraphSequence {
        let mut seq = GraphSequence::new(false);
        seq.ingest_step(1, &["a", "b"], &[("a", "b")]).unwrap();
        seq
    }

    #[test]
    fn smallest_batch() {
        let seq = seq_ab();
        let g = seq.snapshot(1).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn incremental_arrival() {
        let mut seq = seq_ab();
        seq.ingest_step(2, &["c"], &[("a", "c"), ("b", "c")]).unwrap();
        let g = seq.snapshot(2).unwrap();
        assert_eq!(g.edge_count(), 3);
        let c = seq.node_index("c").unwrap();
        assert_eq!(g.degree(c), 2);
        assert_eq!(seq.snapshot(1).unwrap().edge_count(), 1);
    }

    #[test]
    fn ingest_errors() {
        let mut seq = seq_ab();
        assert!(matches!(
            seq.ingest_step(2, &["c"], &[("a", "d")]),
            Err(GraphError::DanglingEdge { .. })
        ));
        assert!(matches!(
            seq.ingest_step(2, &["a"], &[]),
            Err(GraphError::DuplicateNode(_))
        ));
        assert!(matches!(
            seq.ingest_step(2, &["c"], &[("c", "c")]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            seq.ingest_step(2, &["c"], &[("a", "c"), ("c", "a")]),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            seq.ingest_step(2, &["c"], &[("b", "a")]),
            Err(GraphError::StaleEdge { .. })
        ));
        assert!(matches!(
            seq.ingest_step(3, &["c"], &[]),
            Err(GraphError::NonSequentialStep { .. })
        ));
        // failed batches leave the sequence untouched
        assert_eq!(seq.horizon(), 1);
        assert_eq!(seq.node_count(), 2);
    }

    #[test]
    fn future_node_detected_from_batches() {
        let batches = vec![Batch::new(&["a"], &[("a", "b")]), Batch::new(&["b"], &[])];
        assert!(matches!(
            GraphSequence::from_batches(false, &batches),
            Err(GraphError::EdgeToFutureNode { .. })
        ));
    }

    #[test]
    fn snapshot_range_and_conservation() {
        let mut seq = seq_ab();
        seq.ingest_step(2, &["c"], &[("a", "c")]).unwrap();
        seq.ingest_step(3, &["d", "e"], &[("d", "e"), ("b", "d")]).unwrap();
        assert!(matches!(seq.snapshot(0), Err(GraphError::TimeOutOfRange { .. })));
        assert!(matches!(seq.snapshot(4), Err(GraphError::TimeOutOfRange { .. })));
        let first = seq.snapshot(1).unwrap();
        assert_eq!((first.node_count(), first.edge_count()), (2, 1));
        let total: usize = (1..=3).map(|t| seq.batch_edges(t).len()).sum();
        assert_eq!(seq.snapshot(3).unwrap().edge_count(), total);
    }

    #[test]
    fn star_bounds() {
        let leaves: Vec<String> = (0..6).map(|i| format!("l{i}")).collect();
        let mut seq = GraphSequence::new(false);
        seq.ingest_step(1, &["hub"], &[]).unwrap();
        for (i, leaf) in leaves.iter().enumerate() {
            seq.ingest_step(i + 2, &[leaf.as_str()], &[("hub", leaf.as_str())])
                .unwrap();
        }
        let five = seq.truncate(6).unwrap();
        let d5 = DegreeBounds::undirected(5).unwrap();
        assert_eq!(five.verify_bounds(&d5).unwrap(), BoundsVerdict::Ok);
        assert_eq!(
            seq.verify_bounds(&d5).unwrap(),
            BoundsVerdict::Violation(BoundViolation {
                t: 7,
                node: "hub".into(),
                kind: DegreeKind::Total,
                degree: 6
            })
        );
        assert_eq!(
            seq.verify_bounds(&DegreeBounds::directed(1, 1).unwrap()),
            Err(GraphError::ModeMismatch)
        );
    }

    #[test]
    fn directed_cycle_within_unit_bounds() {
        let seq = GraphSequence::from_batches(
            true,
            &[Batch::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")])],
        )
        .unwrap();
        let g = seq.snapshot(1).unwrap();
        for v in g.nodes() {
            assert_eq!((g.in_degree(v), g.out_degree(v)), (1, 1));
        }
        assert!(seq
            .verify_bounds(&DegreeBounds::directed(1, 1).unwrap())
            .unwrap()
            .is_ok());
    }

    #[test]
    fn coarsen_merges_steps() {
        let mut seq = GraphSequence::new(true);
        for t in 1..=4 {
            let id = format!("n{t}");
            if t == 1 {
                seq.ingest_step(t, &[id.as_str()], &[]).unwrap();
            } else {
                let prev = format!("n{}", t - 1);
                seq.ingest_step(t, &[id.as_str()], &[(prev.as_str(), id.as_str())])
                    .unwrap();
            }
        }
        let two = seq.coarsen(2).unwrap();
        assert_eq!(two.horizon(), 2);
        assert_eq!(two.snapshot(1).unwrap().edge_count(), 1);
        assert_eq!(two.snapshot(2).unwrap().edge_count(), 3);
        assert!(seq.coarsen(5).is_err());
    }

    #[test]
    fn undirected_view_merges_opposite_arcs() {
        let seq = GraphSequence::from_batches(true, &[Batch::new(&["a", "b"], &[("a", "b"), ("b", "a")])]).unwrap();
        let und = seq.to_undirected();
        assert!(!und.is_directed());
        assert_eq!(und.edge_count(), 1);
    }

    #[test]
    fn bounds_parse() {
        assert_eq!("5".parse::<DegreeBounds>().unwrap(), DegreeBounds::Undirected { d: 5 });
        assert_eq!(
            "12:8".parse::<DegreeBounds>().unwrap(),
            DegreeBounds::Directed { d_in: 12, d_out: 8 }
        );
        assert!("0".parse::<DegreeBounds>().is_err());
        assert!("a:1".parse::<DegreeBounds>().is_err());
    }

    #[test]
    fn bounds_reject_zero() {
        assert_eq!(DegreeBounds::undirected(0), Err(GraphError::InvalidBound));
        assert_eq!(DegreeBounds::directed(1, 0), Err(GraphError::InvalidBound));
    }
}
