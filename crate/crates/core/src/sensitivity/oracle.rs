//! Exhaustive search for the largest change a single added node can cause in
//! a difference sequence.
//!
//! For a node budget `n` the search enumerates every labelled graph `G'` on
//! nodes `0..n`, every assignment of arrival steps in `1..=t_max`, and takes
//! node 0 as the added node `v*`, so `G = G' - v*`. Because the other nodes
//! are interchangeable, their arrival steps can be restricted to
//! nondecreasing vectors without losing any configuration up to relabelling.
//!
//! Statistics are evaluated on bitmask adjacency with code that shares
//! nothing with [`crate::statistics`].

use rayon::prelude::*;

use super::SensitivityError;
use crate::graph::DegreeBounds;
use crate::statistics::{Pattern, StatisticQuery};

pub const MAX_UNDIRECTED_NODES: usize = 7;
pub const MAX_DIRECTED_NODES: usize = 5;
pub const MAX_STEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimePruning {
    /// Non-added nodes arrive in nondecreasing index order.
    Sorted,
    None,
}

/// Largest difference-sequence distance seen per query, indexed by the
/// maximum degrees of `G'`.
#[derive(Debug, Clone)]
pub struct OracleTable {
    directed: bool,
    queries: Vec<StatisticQuery>,
    dim: usize,
    // queries.len() * dim * dim entries
    best: Vec<u64>,
}

impl OracleTable {
    fn empty(directed: bool, queries: Vec<StatisticQuery>, dim: usize) -> Self {
        let len = queries.len() * dim * dim;
        OracleTable {
            directed,
            queries,
            dim,
            best: vec![0; len],
        }
    }

    fn merge(mut self, other: OracleTable) -> Self {
        for (a, b) in self.best.iter_mut().zip(other.best) {
            *a = (*a).max(b);
        }
        self
    }

    pub fn queries(&self) -> &[StatisticQuery] {
        &self.queries
    }

    /// Maximum distance over all searched pairs whose larger graph satisfies
    /// `bounds`. `None` when the query was not part of the sweep or the
    /// bounds have the wrong mode.
    pub fn value(&self, query: &StatisticQuery, bounds: &DegreeBounds) -> Option<u64> {
        let qi = self.queries.iter().position(|q| q == query)?;
        let (lim_a, lim_b) = match (*bounds, self.directed) {
            (DegreeBounds::Undirected { d }, false) => (d, 0),
            (DegreeBounds::Directed { d_in, d_out }, true) => (d_in, d_out),
            _ => return None,
        };
        let base = qi * self.dim * self.dim;
        let mut best = 0;
        for a in 0..self.dim.min(lim_a + 1) {
            for b in 0..self.dim.min(lim_b + 1) {
                best = best.max(self.best[base + a * self.dim + b]);
            }
        }
        Some(best)
    }
}

/// Single-query, single-bound convenience wrapper around [`oracle_sweep`].
pub fn oracle_diff_sensitivity(
    query: &StatisticQuery,
    bounds: &DegreeBounds,
    n_max: usize,
    t_max: usize,
) -> Result<u64, SensitivityError> {
    query.validate()?;
    query
        .check_direction(bounds.is_directed())
        .map_err(|_| SensitivityError::ModeMismatch {
            query: *query,
            directed: bounds.is_directed(),
        })?;
    let table = oracle_sweep(&[*query], bounds.is_directed(), n_max, t_max, TimePruning::Sorted)?;
    Ok(table.value(query, bounds).expect("query was swept"))
}

/// Runs the search once for several queries. `n_max` counts all nodes of
/// `G'`, the added node included.
pub fn oracle_sweep(
    queries: &[StatisticQuery],
    directed: bool,
    n_max: usize,
    t_max: usize,
    pruning: TimePruning,
) -> Result<OracleTable, SensitivityError> {
    let node_cap = if directed {
        MAX_DIRECTED_NODES
    } else {
        MAX_UNDIRECTED_NODES
    };
    if n_max > node_cap || t_max > MAX_STEPS || t_max == 0 {
        return Err(SensitivityError::BudgetTooLarge { n_max, t_max, directed });
    }
    for q in queries {
        q.validate()?;
        q.check_direction(directed)
            .map_err(|_| SensitivityError::ModeMismatch { query: *q, directed })?;
    }
    let layout = Layout::new(queries, n_max.max(1));
    let dim = n_max.max(1);
    let mut table = OracleTable::empty(directed, queries.to_vec(), dim);
    for n in 1..=n_max {
        let part = sweep_size(&layout, directed, n, t_max, pruning, dim);
        table = table.merge(OracleTable {
            directed,
            queries: queries.to_vec(),
            dim,
            best: part,
        });
    }
    Ok(table)
}

// Where each query's values live in a flat slot vector; histograms take
// `width` slots (degrees 0..width).
struct Layout {
    queries: Vec<StatisticQuery>,
    offsets: Vec<usize>,
    slots: usize,
    width: usize,
}

impl Layout {
    fn new(queries: &[StatisticQuery], width: usize) -> Self {
        let mut offsets = Vec::with_capacity(queries.len() + 1);
        let mut slots = 0;
        for q in queries {
            offsets.push(slots);
            slots += if q.is_histogram() { width } else { 1 };
        }
        offsets.push(slots);
        Layout {
            queries: queries.to_vec(),
            offsets,
            slots,
            width,
        }
    }
}

fn choose(n: u32, k: usize) -> i64 {
    let k = k as u32;
    if k > n {
        return 0;
    }
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

struct Adjacency {
    n: usize,
    out: [u16; 8],
    inn: [u16; 8],
    directed: bool,
}

impl Adjacency {
    fn evaluate(&self, alive: u16, layout: &Layout, dst: &mut [i64]) {
        let n = self.n;
        let mut outd = [0u32; 8];
        let mut ind = [0u32; 8];
        for u in 0..n {
            if alive & (1 << u) != 0 {
                outd[u] = (self.out[u] & alive).count_ones();
                ind[u] = (self.inn[u] & alive).count_ones();
            }
        }
        let is_alive = |u: usize| alive & (1 << u) != 0;
        for (qi, q) in layout.queries.iter().enumerate() {
            let off = layout.offsets[qi];
            match *q {
                StatisticQuery::HighDegree { tau } => {
                    dst[off] = (0..n).filter(|&u| is_alive(u) && outd[u] as usize >= tau).count() as i64;
                }
                StatisticQuery::DegreeHistogram => {
                    dst[off..off + layout.width].fill(0);
                    for u in (0..n).filter(|&u| is_alive(u)) {
                        dst[off + outd[u] as usize] += 1;
                    }
                }
                StatisticQuery::Subgraph(p) => {
                    dst[off] = self.count(p, alive, &outd, &ind);
                }
            }
        }
    }

    fn count(&self, p: Pattern, alive: u16, outd: &[u32; 8], ind: &[u32; 8]) -> i64 {
        let nodes = (0..self.n).filter(|&u| alive & (1 << u) != 0);
        match p {
            Pattern::Edge => {
                let s: u32 = nodes.map(|u| outd[u]).sum();
                if self.directed {
                    s as i64
                } else {
                    (s / 2) as i64
                }
            }
            Pattern::KStar(k) | Pattern::OutKStar(k) => nodes.map(|u| choose(outd[u], k)).sum(),
            Pattern::InKStar(k) => nodes.map(|u| choose(ind[u], k)).sum(),
            Pattern::Triangle => {
                let mut c = 0;
                for u in nodes {
                    let nu = self.out[u] & alive;
                    let mut rest = nu & !((2u16 << u) - 1);
                    while rest != 0 {
                        let v = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        let above_v = !((2u16 << v) - 1);
                        c += (nu & self.out[v] & above_v).count_ones() as i64;
                    }
                }
                c
            }
            Pattern::TriangleCycle | Pattern::TriangleTransitive => {
                let e = |u: usize, v: usize| self.out[u] & (1 << v) != 0;
                let live: Vec<usize> = nodes.collect();
                let mut c = 0;
                for (i, &a) in live.iter().enumerate() {
                    for (j, &b) in live.iter().enumerate().skip(i + 1) {
                        for &d in &live[j + 1..] {
                            let hit = if p == Pattern::TriangleCycle {
                                (e(a, b) && e(b, d) && e(d, a)) || (e(a, d) && e(d, b) && e(b, a))
                            } else {
                                let linked = |x: usize, y: usize| e(x, y) || e(y, x);
                                (e(a, b) && e(a, d) && linked(b, d))
                                    || (e(b, a) && e(b, d) && linked(a, d))
                                    || (e(d, a) && e(d, b) && linked(a, b))
                            };
                            c += hit as i64;
                        }
                    }
                }
                c
            }
        }
    }
}

fn time_vectors(others: usize, t_max: usize, pruning: TimePruning) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![1usize; others];
    loop {
        let keep = match pruning {
            TimePruning::Sorted => cur.windows(2).all(|w| w[0] <= w[1]),
            TimePruning::None => true,
        };
        if keep {
            out.push(cur.clone());
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == others {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= t_max {
                break;
            }
            cur[i] = 1;
            i += 1;
        }
    }
}

fn sweep_size(layout: &Layout, directed: bool, n: usize, t_max: usize, pruning: TimePruning, dim: usize) -> Vec<u64> {
    let pairs: Vec<(usize, usize)> = if directed {
        (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect()
    } else {
        (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect()
    };

    // alive masks per step for G' and G, one entry per timing configuration
    let mut timings: Vec<Vec<(u16, u16)>> = Vec::new();
    for star_time in 1..=t_max {
        for others in time_vectors(n - 1, t_max, pruning) {
            let steps = (1..=t_max)
                .map(|t| {
                    let mut mask = if star_time <= t { 1u16 } else { 0 };
                    for (i, &ti) in others.iter().enumerate() {
                        if ti <= t {
                            mask |= 1 << (i + 1);
                        }
                    }
                    (mask, mask & !1)
                })
                .collect();
            timings.push(steps);
        }
    }

    let q = layout.queries.len();
    let slots = layout.slots;
    let total_masks: u64 = 1 << pairs.len();
    (0..total_masks)
        .into_par_iter()
        .fold(
            || {
                (
                    vec![0u64; q * dim * dim],
                    vec![0i64; (1usize << n) * slots],
                    vec![0i64; q],
                )
            },
            |(mut best, mut cache, mut dist), edge_mask| {
                let mut adj = Adjacency {
                    n,
                    out: [0; 8],
                    inn: [0; 8],
                    directed,
                };
                for (bit, &(u, v)) in pairs.iter().enumerate() {
                    if edge_mask & (1 << bit) != 0 {
                        adj.out[u] |= 1 << v;
                        adj.inn[v] |= 1 << u;
                        if !directed {
                            adj.out[v] |= 1 << u;
                            adj.inn[u] |= 1 << v;
                        }
                    }
                }
                let full = ((1u32 << n) - 1) as u16;
                let (key_a, key_b) = if directed {
                    let max_in = (0..n).map(|u| (adj.inn[u] & full).count_ones()).max().unwrap_or(0);
                    let max_out = (0..n).map(|u| (adj.out[u] & full).count_ones()).max().unwrap_or(0);
                    (max_in as usize, max_out as usize)
                } else {
                    let max_deg = (0..n).map(|u| adj.out[u].count_ones()).max().unwrap_or(0);
                    (max_deg as usize, 0)
                };
                for alive in 0..(1usize << n) {
                    adj.evaluate(alive as u16, layout, &mut cache[alive * slots..(alive + 1) * slots]);
                }
                for steps in &timings {
                    dist.fill(0);
                    let (mut prev_big, mut prev_small) = (None::<usize>, None::<usize>);
                    for &(big, small) in steps {
                        let (big, small) = (big as usize, small as usize);
                        for (qi, acc) in dist.iter_mut().enumerate().take(q) {
                            for s in layout.offsets[qi]..layout.offsets[qi + 1] {
                                let cur_big = cache[big * slots + s];
                                let cur_small = cache[small * slots + s];
                                let pb = prev_big.map_or(0, |p| cache[p * slots + s]);
                                let ps = prev_small.map_or(0, |p| cache[p * slots + s]);
                                *acc += ((cur_big - pb) - (cur_small - ps)).abs();
                            }
                        }
                        prev_big = Some(big);
                        prev_small = Some(small);
                    }
                    for qi in 0..q {
                        let cell = &mut best[qi * dim * dim + key_a * dim + key_b];
                        *cell = (*cell).max(dist[qi] as u64);
                    }
                }
                (best, cache, dist)
            },
        )
        .map(|(best, _, _)| best)
        .reduce(
            || vec![0u64; q * dim * dim],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = (*x).max(y);
                }
                a
            },
        )
}
