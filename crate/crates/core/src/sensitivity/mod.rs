//! Global sensitivities used to calibrate noise.
//!
//! Three regimes are covered: the difference sequence released by
//! `sensdiff`, a single release on a degree-bounded graph, and a single
//! release on a projected graph. [`oracle`] certifies the first regime by
//! exhaustive search on small instances.

pub mod oracle;

use serde::Serialize;
use thiserror::Error;

use crate::graph::DegreeBounds;
use crate::projection::ProjectionThresholds;
use crate::statistics::{binomial, Pattern, StatError, StatisticQuery};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SensitivityError {
    #[error("threshold tau={tau} exceeds the degree bound {bound}")]
    InfeasibleThreshold { tau: usize, bound: usize },
    #[error("no single-release sensitivity is available for `{0}`")]
    UnsupportedBaselineQuery(StatisticQuery),
    #[error("`{query}` does not apply to {} bounds", if *.directed { "directed" } else { "undirected" })]
    ModeMismatch { query: StatisticQuery, directed: bool },
    #[error(transparent)]
    InvalidQuery(#[from] StatError),
    #[error("oracle budget n_max={n_max}, t_max={t_max} is too large for {} search", if *.directed { "directed" } else { "undirected" })]
    BudgetTooLarge { n_max: usize, t_max: usize, directed: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    DiffSequence,
    PerRelease,
    PerReleaseProjected { thresholds: ProjectionThresholds },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::DiffSequence => "diff_sequence",
            Regime::PerRelease => "per_release",
            Regime::PerReleaseProjected { .. } => "per_release_projected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensitivityReport {
    pub value: u64,
    pub formula_id: &'static str,
    pub regime: Regime,
    pub query: StatisticQuery,
    pub bounds: DegreeBounds,
}

fn check(query: &StatisticQuery, directed: bool) -> Result<(), SensitivityError> {
    query.validate()?;
    query
        .check_direction(directed)
        .map_err(|_| SensitivityError::ModeMismatch {
            query: *query,
            directed,
        })
}

fn tau_feasible(tau: usize, bound: usize) -> Result<(), SensitivityError> {
    if tau > bound {
        return Err(SensitivityError::InfeasibleThreshold { tau, bound });
    }
    Ok(())
}

// `a·C(b-1, k-1) + C(b, k)` with b ≥ 1, k ≥ 1
fn star(a: u64, b: u64, k: u64) -> u64 {
    a * binomial(b - 1, k - 1) + binomial(b, k)
}

/// Global sensitivity of the difference sequence of `query` over
/// `bounds`-bounded graph sequences.
pub fn diff_sequence_sensitivity(
    query: &StatisticQuery,
    bounds: &DegreeBounds,
) -> Result<SensitivityReport, SensitivityError> {
    check(query, bounds.is_directed())?;
    let (value, formula_id) = match (*query, *bounds) {
        (StatisticQuery::HighDegree { tau }, DegreeBounds::Undirected { d }) => {
            tau_feasible(tau, d)?;
            (2 * d as u64 + 1, "high_degree:2D+1")
        }
        (StatisticQuery::HighDegree { tau }, DegreeBounds::Directed { d_in, d_out }) => {
            tau_feasible(tau, d_out)?;
            (2 * d_in as u64 + 1, "high_degree:2D_in+1")
        }
        (StatisticQuery::DegreeHistogram, DegreeBounds::Undirected { d }) => {
            let d = d as u64;
            (4 * d * d + 2 * d + 1, "degree_histogram:4D^2+2D+1")
        }
        (StatisticQuery::DegreeHistogram, DegreeBounds::Directed { d_in, d_out }) => {
            let (di, d_o) = (d_in as u64, d_out as u64);
            (4 * d_o * di + 2 * d_o + 1, "degree_histogram:4D_out*D_in+2D_out+1")
        }
        (StatisticQuery::Subgraph(p), DegreeBounds::Undirected { d }) => {
            let d = d as u64;
            match p {
                Pattern::Edge => (d, "edge:D"),
                Pattern::Triangle => (binomial(d, 2), "triangle:C(D,2)"),
                Pattern::KStar(k) => (star(d, d, k as u64), "k_star:D*C(D-1,k-1)+C(D,k)"),
                _ => unreachable!("direction checked above"),
            }
        }
        (StatisticQuery::Subgraph(p), DegreeBounds::Directed { d_in, d_out }) => {
            let (di, d_o) = (d_in as u64, d_out as u64);
            match p {
                Pattern::Edge => (di + d_o, "edge:D_in+D_out"),
                Pattern::TriangleCycle => (di * d_o, "triangle_I:D_in*D_out"),
                Pattern::TriangleTransitive => (binomial(di + d_o, 2), "triangle_II:C(D_in+D_out,2)"),
                Pattern::OutKStar(k) => (star(di, d_o, k as u64), "out_k_star:D_in*C(D_out-1,k-1)+C(D_out,k)"),
                Pattern::InKStar(k) => (star(d_o, di, k as u64), "in_k_star:D_out*C(D_in-1,k-1)+C(D_in,k)"),
                _ => unreachable!("direction checked above"),
            }
        }
    };
    Ok(SensitivityReport {
        value,
        formula_id,
        regime: Regime::DiffSequence,
        query: *query,
        bounds: *bounds,
    })
}

/// Global sensitivity of a single release `f(G_t)` over bounded graphs.
pub fn per_release_sensitivity(
    query: &StatisticQuery,
    bounds: &DegreeBounds,
) -> Result<SensitivityReport, SensitivityError> {
    check(query, bounds.is_directed())?;
    let (value, formula_id) = match (*query, *bounds) {
        (StatisticQuery::HighDegree { tau }, DegreeBounds::Undirected { d }) => {
            tau_feasible(tau, d)?;
            (d as u64 + 1, "per_release.high_degree:D+1")
        }
        (StatisticQuery::HighDegree { tau }, DegreeBounds::Directed { d_in, d_out }) => {
            tau_feasible(tau, d_out)?;
            (d_in as u64 + 1, "per_release.high_degree:D_in+1")
        }
        (StatisticQuery::Subgraph(Pattern::Edge), DegreeBounds::Undirected { d }) => (d as u64, "per_release.edge:D"),
        (StatisticQuery::Subgraph(Pattern::Edge), DegreeBounds::Directed { d_in, d_out }) => {
            ((d_in + d_out) as u64, "per_release.edge:D_in+D_out")
        }
        _ => return Err(SensitivityError::UnsupportedBaselineQuery(*query)),
    };
    Ok(SensitivityReport {
        value,
        formula_id,
        regime: Regime::PerRelease,
        query: *query,
        bounds: *bounds,
    })
}

/// Global sensitivity of a single release computed on the projection of the
/// graph under `thresholds`.
pub fn projected_sensitivity(
    query: &StatisticQuery,
    thresholds: &ProjectionThresholds,
) -> Result<SensitivityReport, SensitivityError> {
    check(query, thresholds.is_directed())?;
    let (value, formula_id, bounds) = match (*query, *thresholds) {
        (StatisticQuery::HighDegree { tau }, ProjectionThresholds::Undirected { d }) => {
            tau_feasible(tau, d)?;
            (
                d as u64 + 1,
                "projected.high_degree:D+1",
                DegreeBounds::Undirected { d },
            )
        }
        (StatisticQuery::HighDegree { tau }, ProjectionThresholds::Directed { d_in, d_out }) => {
            tau_feasible(tau, d_out)?;
            (
                (d_in as u64 + 1).max(d_out as u64 - 1),
                "projected.high_degree:max(D_in+1,D_out-1)",
                DegreeBounds::Directed { d_in, d_out },
            )
        }
        (StatisticQuery::Subgraph(Pattern::Edge), ProjectionThresholds::Undirected { d }) => {
            (d as u64, "projected.edge:D", DegreeBounds::Undirected { d })
        }
        (StatisticQuery::Subgraph(Pattern::Edge), ProjectionThresholds::Directed { d_in, d_out }) => (
            (d_in + d_out) as u64,
            "projected.edge:D_in+D_out",
            DegreeBounds::Directed { d_in, d_out },
        ),
        _ => return Err(SensitivityError::UnsupportedBaselineQuery(*query)),
    };
    Ok(SensitivityReport {
        value,
        formula_id,
        regime: Regime::PerReleaseProjected {
            thresholds: *thresholds,
        },
        query: *query,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> StatisticQuery {
        s.parse().unwrap()
    }

    fn und(d: usize) -> DegreeBounds {
        DegreeBounds::undirected(d).unwrap()
    }

    fn dir(i: usize, o: usize) -> DegreeBounds {
        DegreeBounds::directed(i, o).unwrap()
    }

    #[test]
    fn diff_catalog_examples() {
        assert_eq!(
            diff_sequence_sensitivity(&q("high_degree:3"), &und(10)).unwrap().value,
            21
        );
        assert_eq!(diff_sequence_sensitivity(&q("triangle"), &und(4)).unwrap().value, 6);
        assert_eq!(
            diff_sequence_sensitivity(&q("out_k_star:2"), &dir(2, 3)).unwrap().value,
            7
        );
        assert_eq!(
            diff_sequence_sensitivity(&q("degree_histogram"), &und(3))
                .unwrap()
                .value,
            43
        );
        assert_eq!(
            diff_sequence_sensitivity(&q("degree_histogram"), &dir(2, 3))
                .unwrap()
                .value,
            31
        );
        assert_eq!(
            diff_sequence_sensitivity(&q("high_degree:2"), &dir(4, 2))
                .unwrap()
                .value,
            9
        );
        assert_eq!(diff_sequence_sensitivity(&q("edge"), &dir(2, 3)).unwrap().value, 5);
        assert_eq!(
            diff_sequence_sensitivity(&q("triangle_I"), &dir(2, 3)).unwrap().value,
            6
        );
        assert_eq!(
            diff_sequence_sensitivity(&q("triangle_II"), &dir(2, 3)).unwrap().value,
            10
        );
        assert_eq!(diff_sequence_sensitivity(&q("k_star:1"), &und(3)).unwrap().value, 6);
    }

    #[test]
    fn stars_beyond_bound_vanish() {
        assert_eq!(diff_sequence_sensitivity(&q("k_star:4"), &und(3)).unwrap().value, 0);
        assert_eq!(
            diff_sequence_sensitivity(&q("out_k_star:3"), &dir(3, 2)).unwrap().value,
            0
        );
        assert_eq!(diff_sequence_sensitivity(&q("k_star:3"), &und(3)).unwrap().value, 3 + 1);
    }

    #[test]
    fn in_out_star_symmetry() {
        for (a, b) in [(1, 2), (2, 3), (3, 1), (2, 2)] {
            for k in 1..=3 {
                let out =
                    diff_sequence_sensitivity(&StatisticQuery::Subgraph(Pattern::OutKStar(k)), &dir(a, b)).unwrap();
                let inn =
                    diff_sequence_sensitivity(&StatisticQuery::Subgraph(Pattern::InKStar(k)), &dir(b, a)).unwrap();
                assert_eq!(out.value, inn.value);
            }
        }
    }

    #[test]
    fn tau_feasibility() {
        assert!(diff_sequence_sensitivity(&q("high_degree:5"), &und(5)).is_ok());
        assert_eq!(
            diff_sequence_sensitivity(&q("high_degree:6"), &und(5)).unwrap_err(),
            SensitivityError::InfeasibleThreshold { tau: 6, bound: 5 }
        );
        assert!(diff_sequence_sensitivity(&q("high_degree:3"), &dir(1, 3)).is_ok());
        assert!(diff_sequence_sensitivity(&q("high_degree:4"), &dir(9, 3)).is_err());
    }

    #[test]
    fn direction_checked() {
        assert!(matches!(
            diff_sequence_sensitivity(&q("triangle"), &dir(1, 1)),
            Err(SensitivityError::ModeMismatch { .. })
        ));
        assert!(matches!(
            diff_sequence_sensitivity(&q("triangle_I"), &und(2)),
            Err(SensitivityError::ModeMismatch { .. })
        ));
    }

    #[test]
    fn per_release_catalog() {
        assert_eq!(per_release_sensitivity(&q("high_degree:2"), &und(5)).unwrap().value, 6);
        assert_eq!(per_release_sensitivity(&q("edge"), &dir(2, 3)).unwrap().value, 5);
        assert_eq!(
            per_release_sensitivity(&q("high_degree:1"), &dir(2, 3)).unwrap().value,
            3
        );
        assert_eq!(
            per_release_sensitivity(&q("degree_histogram"), &und(5)).unwrap_err(),
            SensitivityError::UnsupportedBaselineQuery(q("degree_histogram"))
        );
    }

    #[test]
    fn projected_catalog() {
        let und_th = |d| ProjectionThresholds::undirected(d).unwrap();
        let dir_th = |i, o| ProjectionThresholds::directed(i, o).unwrap();
        assert_eq!(projected_sensitivity(&q("high_degree:3"), &und_th(7)).unwrap().value, 8);
        assert_eq!(
            projected_sensitivity(&q("high_degree:3"), &dir_th(2, 9)).unwrap().value,
            8
        );
        assert_eq!(projected_sensitivity(&q("edge"), &und_th(4)).unwrap().value, 4);
        assert_eq!(projected_sensitivity(&q("edge"), &dir_th(2, 5)).unwrap().value, 7);
        assert!(matches!(
            projected_sensitivity(&q("high_degree:8"), &und_th(7)),
            Err(SensitivityError::InfeasibleThreshold { .. })
        ));
        assert!(matches!(
            projected_sensitivity(&q("triangle"), &und_th(7)),
            Err(SensitivityError::UnsupportedBaselineQuery(_))
        ));
    }

    #[test]
    fn report_json() {
        let r = diff_sequence_sensitivity(&q("high_degree:3"), &und(10)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["value"], 21);
        assert_eq!(v["formula_id"], "high_degree:2D+1");
        assert_eq!(v["regime"]["kind"], "diff_sequence");
        assert_eq!(v["query"], "high_degree:3");
    }
}
