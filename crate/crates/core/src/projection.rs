//! Degree-bounding projection by greedy edge admission.
//!
//! Edges are visited in a fixed order and an edge is kept iff both endpoint
//! counters are still strictly below the threshold (tail out-degree and head
//! in-degree for directed graphs). The ordering must be consistent with
//! arrival time so that the sequence form can run online.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphSequence, GraphView, NodeIx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("edge ordering does not cover exactly the edges of the graph")]
    OrderingMismatch,
    #[error("projection thresholds do not match the directedness of the graph")]
    ModeMismatch,
    #[error("projection thresholds must be at least 1")]
    InvalidThreshold,
    #[error("cannot parse projection thresholds `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProjectionThresholds {
    Undirected { d: usize },
    Directed { d_in: usize, d_out: usize },
}

impl ProjectionThresholds {
    pub fn undirected(d: usize) -> Result<Self, ProjectionError> {
        if d == 0 {
            return Err(ProjectionError::InvalidThreshold);
        }
        Ok(ProjectionThresholds::Undirected { d })
    }

    pub fn directed(d_in: usize, d_out: usize) -> Result<Self, ProjectionError> {
        if d_in == 0 || d_out == 0 {
            return Err(ProjectionError::InvalidThreshold);
        }
        Ok(ProjectionThresholds::Directed { d_in, d_out })
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, ProjectionThresholds::Directed { .. })
    }
}

impl fmt::Display for ProjectionThresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionThresholds::Undirected { d } => write!(f, "{d}"),
            ProjectionThresholds::Directed { d_in, d_out } => write!(f, "{d_in}:{d_out}"),
        }
    }
}

impl FromStr for ProjectionThresholds {
    type Err = ProjectionError;

    /// `D` for undirected thresholds, `D_in:D_out` for directed ones.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| ProjectionError::Parse(s.to_string()))
        };
        match s.split_once(':') {
            Some((a, b)) => ProjectionThresholds::directed(num(a)?, num(b)?),
            None => ProjectionThresholds::undirected(num(s)?),
        }
    }
}

/// A total order on edges, split into per-step runs `Λ_1, …, Λ_T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrdering {
    edges: Vec<(NodeIx, NodeIx)>,
    step_ends: Vec<usize>,
}

impl EdgeOrdering {
    /// Single-run ordering of the given edges, in the order given.
    pub fn from_edges(edges: Vec<(NodeIx, NodeIx)>) -> Self {
        let end = edges.len();
        EdgeOrdering {
            edges,
            step_ends: vec![end],
        }
    }

    /// Orders the edges of a standalone view by endpoint ids.
    pub fn for_view(g: &GraphView) -> Self {
        let mut edges: Vec<_> = g.edges().map(|e| canonical_pair(g, e)).collect();
        edges.sort_by(|a, b| id_key(g, *a).cmp(&id_key(g, *b)));
        EdgeOrdering::from_edges(edges)
    }

    pub fn edges(&self) -> &[(NodeIx, NodeIx)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.step_ends.len()
    }

    /// Rank `λ(e)` of every edge, by position.
    pub fn rank(&self, edge: (NodeIx, NodeIx)) -> Option<usize> {
        self.edges.iter().position(|&e| e == edge)
    }

    /// The concatenation `Λ_1 ⋯ Λ_t`.
    pub fn prefix(&self, t: usize) -> EdgeOrdering {
        let end = if t == 0 { 0 } else { self.step_ends[t - 1] };
        EdgeOrdering {
            edges: self.edges[..end].to_vec(),
            step_ends: self.step_ends[..t].to_vec(),
        }
    }
}

fn canonical_pair(g: &GraphView, (u, v): (NodeIx, NodeIx)) -> (NodeIx, NodeIx) {
    if g.is_directed() || g.node_id(u) < g.node_id(v) {
        (u, v)
    } else {
        (v, u)
    }
}

fn id_key(g: &GraphView, (u, v): (NodeIx, NodeIx)) -> (&str, &str) {
    (g.node_id(u), g.node_id(v))
}

/// Sorts edges by `(arrival step, endpoint id pair)`.
pub fn canonical_ordering(seq: &GraphSequence) -> EdgeOrdering {
    let mut edges = Vec::with_capacity(seq.edge_count());
    let mut step_ends = Vec::with_capacity(seq.horizon());
    for t in 1..=seq.horizon() {
        let mut batch = seq.batch_edges(t).to_vec();
        batch.sort_by(|a, b| (seq.node_id(a.0), seq.node_id(a.1)).cmp(&(seq.node_id(b.0), seq.node_id(b.1))));
        edges.extend(batch);
        step_ends.push(edges.len());
    }
    EdgeOrdering { edges, step_ends }
}

struct Admission {
    thresholds: ProjectionThresholds,
    out_count: Vec<usize>,
    in_count: Vec<usize>,
    kept: Vec<(NodeIx, NodeIx)>,
}

impl Admission {
    fn new(thresholds: ProjectionThresholds, n: usize) -> Self {
        Admission {
            thresholds,
            out_count: vec![0; n],
            in_count: vec![0; n],
            kept: Vec::new(),
        }
    }

    fn offer(&mut self, (u, v): (NodeIx, NodeIx)) {
        let admit = match self.thresholds {
            // undirected degrees live in out_count only
            ProjectionThresholds::Undirected { d } => {
                let ok = self.out_count[u] < d && self.out_count[v] < d;
                if ok {
                    self.out_count[u] += 1;
                    self.out_count[v] += 1;
                }
                ok
            }
            ProjectionThresholds::Directed { d_in, d_out } => {
                let ok = self.out_count[u] < d_out && self.in_count[v] < d_in;
                if ok {
                    self.out_count[u] += 1;
                    self.in_count[v] += 1;
                }
                ok
            }
        };
        if admit {
            self.kept.push((u, v));
        }
    }
}

fn check_mode(directed: bool, th: &ProjectionThresholds) -> Result<(), ProjectionError> {
    if directed != th.is_directed() {
        return Err(ProjectionError::ModeMismatch);
    }
    Ok(())
}

/// Greedy projection of a single graph.
pub fn project_graph(
    g: &GraphView,
    ord: &EdgeOrdering,
    th: &ProjectionThresholds,
) -> Result<GraphView, ProjectionError> {
    check_mode(g.is_directed(), th)?;
    if ord.len() != g.edge_count() {
        return Err(ProjectionError::OrderingMismatch);
    }
    let n = g.node_count();
    let mut seen = std::collections::HashSet::with_capacity(ord.len());
    for &(u, v) in ord.edges() {
        let key = if g.is_directed() { (u, v) } else { (u.min(v), u.max(v)) };
        if u >= n || v >= n || !g.has_edge(u, v) || !seen.insert(key) {
            return Err(ProjectionError::OrderingMismatch);
        }
    }
    let mut adm = Admission::new(*th, n);
    for &e in ord.edges() {
        adm.offer(e);
    }
    Ok(GraphView::from_indexed(g.is_directed(), g.names().clone(), n, &adm.kept).mark_projected())
}

/// Online projection: admission decisions made at earlier steps are kept.
/// Returns `G̃_1, …, G̃_T`.
pub fn project_sequence(
    seq: &GraphSequence,
    ord: &EdgeOrdering,
    th: &ProjectionThresholds,
) -> Result<Vec<GraphView>, ProjectionError> {
    check_mode(seq.is_directed(), th)?;
    if ord.steps() != seq.horizon() {
        return Err(ProjectionError::OrderingMismatch);
    }
    let mut start = 0;
    for t in 1..=seq.horizon() {
        let mut want = seq.batch_edges(t).to_vec();
        let mut got = ord.edges[start..ord.step_ends[t - 1]].to_vec();
        want.sort_unstable();
        got.sort_unstable();
        if want != got {
            return Err(ProjectionError::OrderingMismatch);
        }
        start = ord.step_ends[t - 1];
    }

    let mut adm = Admission::new(*th, seq.node_count());
    let mut out = Vec::with_capacity(seq.horizon());
    let mut start = 0;
    for t in 1..=seq.horizon() {
        for &e in &ord.edges[start..ord.step_ends[t - 1]] {
            adm.offer(e);
        }
        start = ord.step_ends[t - 1];
        let g = seq.snapshot(t).expect("t within horizon");
        out.push(
            GraphView::from_indexed(seq.is_directed(), g.names().clone(), g.node_count(), &adm.kept).mark_projected(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Batch;
    use crate::statistics::count_high_degree;

    fn degrees(g: &GraphView) -> Vec<usize> {
        g.nodes().map(|v| g.degree(v)).collect()
    }

    #[test]
    fn canonical_tie_break() {
        let seq =
            GraphSequence::from_batches(false, &[Batch::new(&["a", "b", "c"], &[("b", "a"), ("a", "c")])]).unwrap();
        let ord = canonical_ordering(&seq);
        let ids: Vec<_> = ord
            .edges()
            .iter()
            .map(|&(u, v)| (seq.node_id(u), seq.node_id(v)))
            .collect();
        assert_eq!(ids, vec![("a", "b"), ("a", "c")]);
    }

    #[test]
    fn earlier_steps_first() {
        let seq = GraphSequence::from_batches(
            false,
            &[
                Batch::new(&["x", "y"], &[("x", "y")]),
                Batch::new(&["a"], &[("a", "x")]),
            ],
        )
        .unwrap();
        let ord = canonical_ordering(&seq);
        assert_eq!(ord.steps(), 2);
        assert_eq!(
            ord.edges()[0],
            (seq.node_index("x").unwrap(), seq.node_index("y").unwrap())
        );
        assert_eq!(ord.prefix(1).len(), 1);
    }

    #[test]
    fn star_truncated_greedily() {
        let g = GraphView::from_edge_list(false, &["c", "a", "b", "d"], &[("c", "a"), ("c", "b"), ("c", "d")]).unwrap();
        let ord = EdgeOrdering::for_view(&g);
        let th = ProjectionThresholds::undirected(2).unwrap();
        let p = project_graph(&g, &ord, &th).unwrap();
        assert_eq!(p.edge_count(), 2);
        assert!(p.is_projected());
        // c-a and c-b come first in id order
        assert!(p.has_edge(0, 1) && p.has_edge(0, 2) && !p.has_edge(0, 3));
    }

    #[test]
    fn inactive_thresholds_keep_everything() {
        let g = GraphView::from_edge_list(false, &["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let p = project_graph(
            &g,
            &EdgeOrdering::for_view(&g),
            &ProjectionThresholds::undirected(2).unwrap(),
        )
        .unwrap();
        assert_eq!(degrees(&p), degrees(&g));
        let d = GraphView::from_edge_list(true, &["u", "v"], &[("u", "v")]).unwrap();
        let p = project_graph(
            &d,
            &EdgeOrdering::for_view(&d),
            &ProjectionThresholds::directed(1, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(p.edge_count(), 1);
    }

    #[test]
    fn ordering_must_match() {
        let g = GraphView::from_edge_list(false, &["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let th = ProjectionThresholds::undirected(1).unwrap();
        assert_eq!(
            project_graph(&g, &EdgeOrdering::from_edges(vec![(0, 1)]), &th).unwrap_err(),
            ProjectionError::OrderingMismatch
        );
        assert_eq!(
            project_graph(&g, &EdgeOrdering::from_edges(vec![(0, 1), (0, 2)]), &th).unwrap_err(),
            ProjectionError::OrderingMismatch
        );
        assert_eq!(
            project_graph(
                &g,
                &EdgeOrdering::for_view(&g),
                &ProjectionThresholds::directed(1, 1).unwrap()
            )
            .unwrap_err(),
            ProjectionError::ModeMismatch
        );
    }

    #[test]
    fn directed_admission_checks_tail_out_and_head_in() {
        let g = GraphView::from_edge_list(true, &["a", "b", "c"], &[("a", "b"), ("a", "c"), ("c", "b")]).unwrap();
        let th = ProjectionThresholds::directed(1, 2).unwrap();
        let p = project_graph(&g, &EdgeOrdering::for_view(&g), &th).unwrap();
        // (a,b), (a,c) kept; (c,b) rejected since b already has in-degree 1
        assert_eq!(p.edge_count(), 2);
        assert!(!p.has_edge(2, 1));
    }

    #[test]
    fn sequence_form_matches_per_snapshot_projection() {
        let seq = GraphSequence::from_batches(
            false,
            &[
                Batch::new(&["h", "a"], &[("h", "a")]),
                Batch::new(&["b", "c"], &[("h", "b"), ("b", "c")]),
                Batch::new(&["d"], &[("h", "d"), ("c", "d"), ("a", "d")]),
            ],
        )
        .unwrap();
        let ord = canonical_ordering(&seq);
        let th = ProjectionThresholds::undirected(2).unwrap();
        let views = project_sequence(&seq, &ord, &th).unwrap();
        for t in 1..=3 {
            let direct = project_graph(&seq.snapshot(t).unwrap(), &ord.prefix(t), &th).unwrap();
            let a: Vec<_> = views[t - 1].edges().collect();
            let b: Vec<_> = direct.edges().collect();
            assert_eq!(a, b, "step {t}");
            assert!(views[t - 1].nodes().all(|v| views[t - 1].degree(v) <= 2));
        }
        assert_eq!(
            count_high_degree(&views[2], 2),
            views[2].nodes().filter(|&v| views[2].degree(v) == 2).count() as u64
        );
    }

    #[test]
    fn threshold_parsing() {
        assert_eq!(
            "5".parse::<ProjectionThresholds>().unwrap(),
            ProjectionThresholds::Undirected { d: 5 }
        );
        assert_eq!(
            "2:9".parse::<ProjectionThresholds>().unwrap(),
            ProjectionThresholds::Directed { d_in: 2, d_out: 9 }
        );
        assert!("0".parse::<ProjectionThresholds>().is_err());
        assert!("x".parse::<ProjectionThresholds>().is_err());
    }
}
