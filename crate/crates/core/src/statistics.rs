//! Exact graph statistics: threshold degree counts, degree histograms and
//! subgraph counts.
//!
//! Directed graphs use out-degrees for both degree statistics. A k-star copy
//! is a pair (center, k-subset of the center's neighbours), so for `k = 1`
//! every undirected edge is counted twice, once per endpoint as center.
//! Directed triangles are counted per node triple, so reciprocal arcs never
//! produce two copies on the same three nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{GraphView, NodeIx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatError {
    #[error("pattern `{pattern}` cannot be counted on a {} graph", if *.directed { "directed" } else { "undirected" })]
    PatternDirectionMismatch { pattern: Pattern, directed: bool },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    Edge,
    Triangle,
    KStar(usize),
    /// Directed 3-cycle `(v1,v2),(v2,v3),(v3,v1)`.
    TriangleCycle,
    /// Transitive triangle `(v1,v2),(v1,v3),(v2,v3)`.
    TriangleTransitive,
    OutKStar(usize),
    InKStar(usize),
}

impl Pattern {
    /// `Some(directed)` for patterns tied to one kind of graph, `None` for
    /// the edge pattern, which is defined on both.
    pub fn directedness(&self) -> Option<bool> {
        match self {
            Pattern::Edge => None,
            Pattern::Triangle | Pattern::KStar(_) => Some(false),
            _ => Some(true),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Edge => write!(f, "edge"),
            Pattern::Triangle => write!(f, "triangle"),
            Pattern::KStar(k) => write!(f, "k_star:{k}"),
            Pattern::TriangleCycle => write!(f, "triangle_I"),
            Pattern::TriangleTransitive => write!(f, "triangle_II"),
            Pattern::OutKStar(k) => write!(f, "out_k_star:{k}"),
            Pattern::InKStar(k) => write!(f, "in_k_star:{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StatisticQuery {
    HighDegree { tau: usize },
    DegreeHistogram,
    Subgraph(Pattern),
}

impl StatisticQuery {
    pub fn is_histogram(&self) -> bool {
        matches!(self, StatisticQuery::DegreeHistogram)
    }

    pub fn validate(&self) -> Result<(), StatError> {
        match self {
            StatisticQuery::HighDegree { tau: 0 } => {
                Err(StatError::InvalidQuery("degree threshold must be at least 1".into()))
            }
            StatisticQuery::Subgraph(Pattern::KStar(0) | Pattern::OutKStar(0) | Pattern::InKStar(0)) => {
                Err(StatError::InvalidQuery("star size must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Fails when the query is tied to the other kind of graph.
    pub fn check_direction(&self, directed: bool) -> Result<(), StatError> {
        if let StatisticQuery::Subgraph(p) = self {
            if p.directedness().is_some_and(|d| d != directed) {
                return Err(StatError::PatternDirectionMismatch { pattern: *p, directed });
            }
        }
        Ok(())
    }
}

impl fmt::Display for StatisticQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticQuery::HighDegree { tau } => write!(f, "high_degree:{tau}"),
            StatisticQuery::DegreeHistogram => write!(f, "degree_histogram"),
            StatisticQuery::Subgraph(p) => p.fmt(f),
        }
    }
}

impl FromStr for StatisticQuery {
    type Err = StatError;

    /// Parses the [`Display`](fmt::Display) form, e.g. `high_degree:3`,
    /// `degree_histogram`, `edge`, `k_star:2`, `triangle_II`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        let number = |what: &str| -> Result<usize, StatError> {
            let arg = arg.ok_or_else(|| StatError::InvalidQuery(format!("`{name}` needs `:{what}`")))?;
            arg.parse()
                .map_err(|_| StatError::InvalidQuery(format!("bad {what} `{arg}`")))
        };
        let no_arg = |q: StatisticQuery| match arg {
            None => Ok(q),
            Some(_) => Err(StatError::InvalidQuery(format!("`{name}` takes no argument"))),
        };
        let q = match name {
            "high_degree" => StatisticQuery::HighDegree { tau: number("tau")? },
            "degree_histogram" => no_arg(StatisticQuery::DegreeHistogram)?,
            "edge" => no_arg(StatisticQuery::Subgraph(Pattern::Edge))?,
            "triangle" => no_arg(StatisticQuery::Subgraph(Pattern::Triangle))?,
            "triangle_I" => no_arg(StatisticQuery::Subgraph(Pattern::TriangleCycle))?,
            "triangle_II" => no_arg(StatisticQuery::Subgraph(Pattern::TriangleTransitive))?,
            "k_star" => StatisticQuery::Subgraph(Pattern::KStar(number("k")?)),
            "out_k_star" => StatisticQuery::Subgraph(Pattern::OutKStar(number("k")?)),
            "in_k_star" => StatisticQuery::Subgraph(Pattern::InKStar(number("k")?)),
            other => return Err(StatError::InvalidQuery(format!("unknown statistic `{other}`"))),
        };
        q.validate()?;
        Ok(q)
    }
}

impl TryFrom<String> for StatisticQuery {
    type Error = StatError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StatisticQuery> for String {
    fn from(q: StatisticQuery) -> String {
        q.to_string()
    }
}

/// Sparse degree histogram `d -> h(d)`; only positive counts are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram(BTreeMap<usize, u64>);

impl Histogram {
    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut map = BTreeMap::new();
        for d in degrees {
            *map.entry(d).or_insert(0) += 1;
        }
        Histogram(map)
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (usize, u64)>) -> Self {
        Histogram(counts.into_iter().filter(|&(_, c)| c > 0).collect())
    }

    pub fn get(&self, degree: usize) -> u64 {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(&d, &c)| (d, c))
    }

    /// Number of nodes counted, `Σ_d h(d)`.
    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    /// Dense vector `h(0..width)`; degrees at or beyond `width` are dropped.
    pub fn to_dense(&self, width: usize) -> Vec<u64> {
        (0..width).map(|d| self.get(d)).collect()
    }
}

impl Serialize for Histogram {
    /// Degree 0 is left out of serialized output.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.0.iter().filter(|(&d, _)| d != 0))
    }
}

/// `Σ_d |a(d) - b(d)|`, reading missing degrees as zero.
pub fn histogram_distance(a: &Histogram, b: &Histogram) -> u64 {
    let mut total = 0;
    for (d, ca) in a.iter() {
        total += ca.abs_diff(b.get(d));
    }
    for (d, cb) in b.iter() {
        if a.get(d) == 0 {
            total += cb;
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum StatValue {
    Scalar(u64),
    Histogram(Histogram),
}

impl StatValue {
    pub fn as_scalar(&self) -> Option<u64> {
        match self {
            StatValue::Scalar(v) => Some(*v),
            StatValue::Histogram(_) => None,
        }
    }

    pub fn as_histogram(&self) -> Option<&Histogram> {
        match self {
            StatValue::Histogram(h) => Some(h),
            StatValue::Scalar(_) => None,
        }
    }
}

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Nodes whose (out-)degree is at least `tau`.
pub fn count_high_degree(g: &GraphView, tau: usize) -> u64 {
    g.stat_degrees().filter(|&d| d >= tau).count() as u64
}

/// Histogram of (out-)degrees, including degree zero.
pub fn degree_histogram(g: &GraphView) -> Histogram {
    Histogram::from_degrees(g.stat_degrees())
}

pub fn count_subgraph(g: &GraphView, pattern: Pattern) -> Result<u64, StatError> {
    StatisticQuery::Subgraph(pattern).check_direction(g.is_directed())?;
    let count = match pattern {
        Pattern::Edge => g.edge_count() as u64,
        Pattern::Triangle => undirected_triangles(g),
        Pattern::KStar(k) => g.nodes().map(|v| binomial(g.degree(v) as u64, k as u64)).sum(),
        Pattern::OutKStar(k) => g.nodes().map(|v| binomial(g.out_degree(v) as u64, k as u64)).sum(),
        Pattern::InKStar(k) => g.nodes().map(|v| binomial(g.in_degree(v) as u64, k as u64)).sum(),
        Pattern::TriangleCycle | Pattern::TriangleTransitive => directed_triangles(g, pattern),
    };
    Ok(count)
}

pub fn evaluate(query: &StatisticQuery, g: &GraphView) -> Result<StatValue, StatError> {
    query.validate()?;
    Ok(match *query {
        StatisticQuery::HighDegree { tau } => StatValue::Scalar(count_high_degree(g, tau)),
        StatisticQuery::DegreeHistogram => StatValue::Histogram(degree_histogram(g)),
        StatisticQuery::Subgraph(p) => StatValue::Scalar(count_subgraph(g, p)?),
    })
}

/// `f(G_1), …, f(G_T)` for every snapshot of `seq`.
pub fn exact_series(seq: &crate::graph::GraphSequence, query: &StatisticQuery) -> Result<Vec<StatValue>, StatError> {
    query.check_direction(seq.is_directed())?;
    seq.snapshots().iter().map(|g| evaluate(query, g)).collect()
}

// |{x in a ∩ b : x > above}| for sorted slices
fn sorted_intersection(a: &[NodeIx], b: &[NodeIx], above: Option<NodeIx>) -> u64 {
    let start = |s: &[NodeIx]| above.map_or(0, |m| s.partition_point(|&x| x <= m));
    let (mut i, mut j, mut n) = (start(a), start(b), 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

// u < v < w, each triangle seen once from its smallest vertex pair
fn undirected_triangles(g: &GraphView) -> u64 {
    let mut total = 0;
    for u in g.nodes() {
        let nu = g.neighbors(u);
        for &v in nu.iter().filter(|&&v| v > u) {
            total += sorted_intersection(nu, g.neighbors(v), Some(v));
        }
    }
    total
}

// Directed triangles are counted per node triple: a triple counts once if
// its arcs contain the pattern, however many reciprocal arcs it has.
fn directed_triangles(g: &GraphView, pattern: Pattern) -> u64 {
    let n = g.node_count();
    let mut both: Vec<Vec<NodeIx>> = Vec::with_capacity(n);
    for v in g.nodes() {
        let mut adj: Vec<NodeIx> = g.out_neighbors(v).iter().chain(g.in_neighbors(v)).copied().collect();
        adj.sort_unstable();
        adj.dedup();
        both.push(adj);
    }
    let mut total = 0;
    for u in g.nodes() {
        for &v in both[u].iter().filter(|&&v| v > u) {
            let (mut i, mut j) = (
                both[u].partition_point(|&x| x <= v),
                both[v].partition_point(|&x| x <= v),
            );
            while i < both[u].len() && j < both[v].len() {
                let (a, b) = (both[u][i], both[v][j]);
                if a < b {
                    i += 1;
                } else if a > b {
                    j += 1;
                } else {
                    let hit = match pattern {
                        Pattern::TriangleCycle => has_cycle(g, u, v, a),
                        _ => has_transitive(g, u, v, a),
                    };
                    total += hit as u64;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    total
}

fn has_cycle(g: &GraphView, a: NodeIx, b: NodeIx, c: NodeIx) -> bool {
    (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(c, a))
        || (g.has_edge(a, c) && g.has_edge(c, b) && g.has_edge(b, a))
}

// some node reaches both others and one of those reaches the last
fn has_transitive(g: &GraphView, a: NodeIx, b: NodeIx, c: NodeIx) -> bool {
    [(a, b, c), (b, a, c), (c, a, b)]
        .iter()
        .any(|&(src, x, y)| g.has_edge(src, x) && g.has_edge(src, y) && (g.has_edge(x, y) || g.has_edge(y, x)))
}
