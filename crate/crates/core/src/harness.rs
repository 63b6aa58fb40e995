//! Experiment runner: datasets, parameter rules, scoring and aggregation.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::edgelist::{self, LoadOptions};
use crate::generators::{self, GeneratorError, PaTransmissionParams, SirParams};
use crate::graph::{DegreeBounds, GraphError, GraphSequence};
use crate::mechanisms::{MechanismError, PreparedRelease, ReleaseSeries, SeriesValues};
use crate::projection::ProjectionThresholds;
use crate::sensitivity::SensitivityError;
use crate::statistics::{self, StatError, StatValue, StatisticQuery};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("released series has {released} steps, truth has {truth}")]
    LengthMismatch { released: usize, truth: usize },
    #[error("the graph has no nodes")]
    EmptyGraph,
    #[error("percentile must lie strictly between 0 and 100, got {0}")]
    InvalidPercentile(f64),
    #[error("bound granularity must be at least 1")]
    InvalidGranularity,
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{context}: {source}")]
    Cell {
        context: String,
        source: Box<MechanismError>,
    },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Statistic(#[from] StatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeError {
    pub value: f64,
    /// Steps left out because the exact statistic was zero.
    pub skipped: usize,
}

/// `Σ_t |released_t - truth_t| / truth_t`, skipping steps with `truth_t = 0`.
pub fn relative_l1_error(released: &[f64], truth: &[f64]) -> Result<RelativeError, HarnessError> {
    if released.len() != truth.len() {
        return Err(HarnessError::LengthMismatch {
            released: released.len(),
            truth: truth.len(),
        });
    }
    let mut value = 0.0;
    let mut skipped = 0;
    for (&a, &f) in released.iter().zip(truth) {
        if f == 0.0 {
            skipped += 1;
        } else {
            value += (a - f).abs() / f.abs();
        }
    }
    Ok(RelativeError { value, skipped })
}

/// Histogram counterpart: `Σ_t ‖A_t - h_t‖₁ / ‖h_t‖₁`. Degrees missing from
/// either side count as zero.
pub fn histogram_relative_error(released: &[Vec<f64>], truth: &[Vec<f64>]) -> Result<RelativeError, HarnessError> {
    if released.len() != truth.len() {
        return Err(HarnessError::LengthMismatch {
            released: released.len(),
            truth: truth.len(),
        });
    }
    let mut value = 0.0;
    let mut skipped = 0;
    for (a, h) in released.iter().zip(truth) {
        let norm: f64 = h.iter().map(|x| x.abs()).sum();
        if norm == 0.0 {
            skipped += 1;
            continue;
        }
        let width = a.len().max(h.len());
        let dist: f64 = (0..width)
            .map(|d| (a.get(d).copied().unwrap_or(0.0) - h.get(d).copied().unwrap_or(0.0)).abs())
            .sum();
        value += dist / norm;
    }
    Ok(RelativeError { value, skipped })
}

pub fn score(release: &ReleaseSeries, truth: &SeriesValues) -> Result<RelativeError, HarnessError> {
    match (&release.releases, truth) {
        (SeriesValues::Scalar(a), SeriesValues::Scalar(f)) => relative_l1_error(a, f),
        (SeriesValues::Histogram(a), SeriesValues::Histogram(h)) => histogram_relative_error(a, h),
        _ => Err(HarnessError::InvalidConfig(
            "release and truth have different shapes".into(),
        )),
    }
}

/// Exact `f(G_t)` for all steps, in the shape releases use.
pub fn truth_series(seq: &GraphSequence, query: &StatisticQuery) -> Result<SeriesValues, HarnessError> {
    let values = statistics::exact_series(seq, query)?;
    Ok(match values.first() {
        Some(StatValue::Histogram(_)) => {
            let width = values
                .iter()
                .filter_map(|v| v.as_histogram().and_then(|h| h.max_degree()))
                .max()
                .map_or(1, |d| d + 1);
            SeriesValues::Histogram(
                values
                    .iter()
                    .map(|v| {
                        let h = v.as_histogram().expect("uniform series");
                        h.to_dense(width).into_iter().map(|c| c as f64).collect()
                    })
                    .collect(),
            )
        }
        _ => SeriesValues::Scalar(
            values
                .iter()
                .map(|v| v.as_scalar().expect("uniform series") as f64)
                .collect(),
        ),
    })
}

/// Nearest-rank percentile of the final snapshot's (out-)degrees, at least 1.
pub fn derive_tau(seq: &GraphSequence, percentile: f64) -> Result<usize, HarnessError> {
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(HarnessError::InvalidPercentile(percentile));
    }
    if seq.horizon() == 0 || seq.node_count() == 0 {
        return Err(HarnessError::EmptyGraph);
    }
    let g = seq.snapshot(seq.horizon())?;
    let mut degrees: Vec<usize> = g.stat_degrees().collect();
    degrees.sort_unstable();
    Ok(nearest_rank(&degrees, percentile).max(1))
}

/// Element of rank `⌈p/100 · n⌉` (1-based) of a sorted slice.
pub fn nearest_rank(sorted: &[usize], percentile: f64) -> usize {
    let n = sorted.len();
    let rank = ((percentile / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Measured maximum degree (per direction when directed), rounded up to a
/// multiple of `granularity`. A maximum of zero maps to `granularity`.
pub fn derive_bounds(seq: &GraphSequence, granularity: usize) -> Result<DegreeBounds, HarnessError> {
    if granularity == 0 {
        return Err(HarnessError::InvalidGranularity);
    }
    if seq.node_count() == 0 {
        return Err(HarnessError::EmptyGraph);
    }
    let round = |m: usize| m.max(1).div_ceil(granularity) * granularity;
    let (max_in, max_out) = seq.max_degrees();
    Ok(if seq.is_directed() {
        DegreeBounds::directed(round(max_in), round(max_out))?
    } else {
        DegreeBounds::undirected(round(max_out))?
    })
}

/// Multiples of `step` up to the measured maximum rounded up to `step`;
/// for directed sequences every (in, out) combination.
pub fn default_tuning_grid(seq: &GraphSequence, step: usize) -> Result<Vec<ProjectionThresholds>, HarnessError> {
    let levels = |top: usize| (1..=top / step).map(move |i| i * step);
    Ok(match derive_bounds(seq, step)? {
        DegreeBounds::Undirected { d } => levels(d).map(|d| ProjectionThresholds::Undirected { d }).collect(),
        DegreeBounds::Directed { d_in, d_out } => levels(d_in)
            .flat_map(|i| levels(d_out).map(move |o| ProjectionThresholds::Directed { d_in: i, d_out: o }))
            .collect(),
    })
}

#[derive(Debug, Clone)]
pub enum DatasetSource {
    Synthetic1(PaTransmissionParams),
    Synthetic2(SirParams),
    EdgeList { path: PathBuf, options: LoadOptions },
    Inline { name: String, seq: GraphSequence },
}

impl DatasetSource {
    pub fn name(&self) -> String {
        match self {
            DatasetSource::Synthetic1(_) => "synthetic1".into(),
            DatasetSource::Synthetic2(_) => "synthetic2".into(),
            DatasetSource::EdgeList { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "edgelist".into()),
            DatasetSource::Inline { name, .. } => name.clone(),
        }
    }

    pub fn load(&self) -> Result<GraphSequence, HarnessError> {
        Ok(match self {
            DatasetSource::Synthetic1(p) => generators::generate_pa_transmission(p)?,
            DatasetSource::Synthetic2(p) => generators::generate_sir_transmission(p)?,
            DatasetSource::EdgeList { path, options } => {
                let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
                    path: path.display().to_string(),
                    msg: e.to_string(),
                })?;
                edgelist::parse_edge_list(&text, options)?
            }
            DatasetSource::Inline { seq, .. } => seq.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    Explicit(usize),
    Percentile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundRule {
    Explicit(DegreeBounds),
    Measured { granularity: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MechanismTemplate {
    SensDiff,
    ComposeBounded,
    /// `None` uses [`default_tuning_grid`] with step 5.
    ComposeProjection {
        candidates: Option<Vec<ProjectionThresholds>>,
    },
}

impl MechanismTemplate {
    pub fn id(&self) -> &'static str {
        match self {
            MechanismTemplate::SensDiff => "sensdiff",
            MechanismTemplate::ComposeBounded => "compose_bounded",
            MechanismTemplate::ComposeProjection { .. } => "compose_projection",
        }
    }
}

impl std::str::FromStr for MechanismTemplate {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sensdiff" => Ok(MechanismTemplate::SensDiff),
            "compose_bounded" => Ok(MechanismTemplate::ComposeBounded),
            "compose_projection" => Ok(MechanismTemplate::ComposeProjection { candidates: None }),
            other => Err(HarnessError::InvalidConfig(format!("unknown mechanism `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    /// For `high_degree` the threshold is replaced according to `tau_rule`.
    pub query: StatisticQuery,
    pub tau_rule: Option<TauRule>,
    pub bound_rule: BoundRule,
    pub mechanisms: Vec<MechanismTemplate>,
    pub epsilons: Vec<f64>,
    /// Release counts `T`; the dataset is coarsened to each. Empty means the
    /// native horizon.
    pub releases: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub zero_noise: bool,
    /// Drop edge directions before anything else.
    pub undirected: bool,
    /// Record per-row wall time; off gives byte-identical output.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSource, query: StatisticQuery) -> Self {
        ExperimentConfig {
            dataset,
            query,
            tau_rule: None,
            bound_rule: BoundRule::Measured { granularity: 5 },
            mechanisms: vec![
                MechanismTemplate::SensDiff,
                MechanismTemplate::ComposeBounded,
                MechanismTemplate::ComposeProjection { candidates: None },
            ],
            epsilons: vec![1.0],
            releases: Vec::new(),
            trials: 1,
            seed: 0,
            zero_noise: false,
            undirected: false,
            timing: true,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(HarnessError::InvalidConfig(
                "epsilon grid must be nonempty and positive".into(),
            ));
        }
        if self.mechanisms.is_empty() {
            return Err(HarnessError::InvalidConfig("no mechanism selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub dataset: String,
    pub query: String,
    pub mechanism: String,
    pub epsilon: f64,
    #[serde(rename = "T")]
    pub releases: usize,
    pub trial: usize,
    pub rel_l1_error: f64,
    pub skipped_terms: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub query: String,
    pub mechanism: String,
    pub epsilon: f64,
    #[serde(rename = "T")]
    pub releases: usize,
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
    pub sensitivity: u64,
    pub noise_scale: f64,
    pub thresholds: Option<String>,
    pub bounds: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_for(&self, mechanism: &str, epsilon: f64, releases: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.mechanism == mechanism && s.epsilon == epsilon && s.releases == releases)
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct Trial {
    error: RelativeError,
    wall_ms: f64,
}

fn run_trials(
    prepared: &PreparedRelease,
    truth: &SeriesValues,
    epsilon: f64,
    cfg: &ExperimentConfig,
) -> Result<Vec<Trial>, MechanismError> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let start = Instant::now();
            let release = prepared.sample(epsilon, cfg.seed, trial as u64, cfg.zero_noise)?;
            let error = score(&release, truth)?;
            let wall_ms = if cfg.timing {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            Ok(Trial { error, wall_ms })
        })
        .collect()
}

/// Runs every (T, ε, mechanism, trial) cell. The dataset is built once and
/// only the noise varies between trials. For the projection baseline with
/// several candidates, the candidate with the lowest mean error at each
/// (T, ε) is reported.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let dataset = cfg.dataset.name();
    let mut base = cfg.dataset.load()?;
    if cfg.undirected {
        base = base.to_undirected();
    }
    if base.horizon() == 0 {
        return Err(HarnessError::EmptyGraph);
    }
    let release_counts = if cfg.releases.is_empty() {
        vec![base.horizon()]
    } else {
        cfg.releases.clone()
    };

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &t_count in &release_counts {
        let seq = if t_count == base.horizon() {
            base.clone()
        } else {
            base.coarsen(t_count)?
        };
        let bounds = match cfg.bound_rule {
            BoundRule::Explicit(b) => b,
            BoundRule::Measured { granularity } => derive_bounds(&seq, granularity)?,
        };
        let query = match (cfg.query, cfg.tau_rule) {
            (StatisticQuery::HighDegree { .. }, Some(TauRule::Explicit(tau))) => StatisticQuery::HighDegree { tau },
            (StatisticQuery::HighDegree { .. }, Some(TauRule::Percentile(p))) => StatisticQuery::HighDegree {
                tau: derive_tau(&seq, p)?,
            },
            (q, _) => q,
        };
        let truth = truth_series(&seq, &query)?;
        let query_name = query.to_string();

        for &epsilon in &cfg.epsilons {
            for template in &cfg.mechanisms {
                let context = |e: MechanismError| HarnessError::Cell {
                    context: format!("{dataset} {query_name} {} eps={epsilon} T={t_count}", template.id()),
                    source: Box::new(e),
                };
                let candidates: Vec<(Option<ProjectionThresholds>, PreparedRelease)> = match template {
                    MechanismTemplate::SensDiff => {
                        vec![(None, PreparedRelease::sensdiff(&seq, &query, &bounds).map_err(context)?)]
                    }
                    MechanismTemplate::ComposeBounded => {
                        vec![(
                            None,
                            PreparedRelease::compose_bounded(&seq, &query, &bounds).map_err(context)?,
                        )]
                    }
                    MechanismTemplate::ComposeProjection { candidates } => {
                        match candidates {
                            Some(list) if !list.is_empty() => list
                                .iter()
                                .map(|th| Ok((Some(*th), PreparedRelease::compose_projection(&seq, &query, th)?)))
                                .collect::<Result<_, MechanismError>>()
                                .map_err(context)?,
                            Some(_) => return Err(context(MechanismError::EmptyTuningList)),
                            None => {
                                // grid points below the query threshold are skipped
                                let step = match cfg.bound_rule {
                                    BoundRule::Measured { granularity } => granularity,
                                    BoundRule::Explicit(_) => 5,
                                };
                                let mut kept = Vec::new();
                                for th in default_tuning_grid(&seq, step)? {
                                    match PreparedRelease::compose_projection(&seq, &query, &th) {
                                        Ok(p) => kept.push((Some(th), p)),
                                        Err(MechanismError::Sensitivity(SensitivityError::InfeasibleThreshold {
                                            ..
                                        })) => {}
                                        Err(e) => return Err(context(e)),
                                    }
                                }
                                if kept.is_empty() {
                                    return Err(context(MechanismError::EmptyTuningList));
                                }
                                kept
                            }
                        }
                    }
                };
                let mut best: Option<(f64, Option<ProjectionThresholds>, &PreparedRelease, Vec<Trial>)> = None;
                for (th, prepared) in &candidates {
                    let trials = run_trials(prepared, &truth, epsilon, cfg).map_err(context)?;
                    let errors: Vec<f64> = trials.iter().map(|t| t.error.value).collect();
                    let (mean, _) = mean_std(&errors);
                    if best.as_ref().is_none_or(|(m, ..)| mean < *m) {
                        best = Some((mean, *th, prepared, trials));
                    }
                }
                let (_, th, prepared, trials) = best.expect("at least one candidate");
                let first = rows.len();
                for (i, trial) in trials.iter().enumerate() {
                    rows.push(ResultRow {
                        dataset: dataset.clone(),
                        query: query_name.clone(),
                        mechanism: template.id().to_string(),
                        epsilon,
                        releases: t_count,
                        trial: i,
                        rel_l1_error: trial.error.value,
                        skipped_terms: trial.error.skipped,
                        wall_ms: trial.wall_ms,
                    });
                }
                let errors: Vec<f64> = rows[first..].iter().map(|r| r.rel_l1_error).collect();
                let (mean, std) = mean_std(&errors);
                summary.push(SummaryRow {
                    dataset: dataset.clone(),
                    query: query_name.clone(),
                    mechanism: template.id().to_string(),
                    epsilon,
                    releases: t_count,
                    trials: cfg.trials,
                    mean,
                    std,
                    sensitivity: prepared.sensitivity().value,
                    noise_scale: prepared.noise_scale(epsilon),
                    thresholds: th.map(|t| t.to_string()),
                    bounds: bounds.to_string(),
                });
            }
        }
    }
    Ok(ExperimentReport { rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Batch;

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_l1_error(&[3.0, 4.0], &[3.0, 4.0]).unwrap().value, 0.0);
        let r = relative_l1_error(&[11.0, 18.0], &[10.0, 20.0]).unwrap();
        assert!((r.value - 0.2).abs() < 1e-12);
        let r = relative_l1_error(&[3.0, 5.0], &[0.0, 5.0]).unwrap();
        assert_eq!(r, RelativeError { value: 0.0, skipped: 1 });
        assert!(matches!(
            relative_l1_error(&[1.0], &[1.0, 2.0]),
            Err(HarnessError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn histogram_error() {
        let truth = vec![vec![0.0, 4.0, 0.0, 0.0, 1.0]];
        let r = histogram_relative_error(&[vec![1.0, 4.0]], &truth).unwrap();
        assert!((r.value - 2.0 / 5.0).abs() < 1e-12);
    }

    fn star_sequence(leaves: &[usize]) -> GraphSequence {
        // one hub per entry with that many leaves
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (h, &k) in leaves.iter().enumerate() {
            nodes.push(format!("h{h}"));
            for l in 0..k {
                nodes.push(format!("h{h}l{l}"));
                edges.push((format!("h{h}"), format!("h{h}l{l}")));
            }
        }
        GraphSequence::from_batches(false, &[Batch { nodes, edges }]).unwrap()
    }

    #[test]
    fn nearest_rank_rules() {
        assert_eq!(nearest_rank(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 9], 90.0), 1);
        assert_eq!(nearest_rank(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 9], 95.0), 9);
        assert_eq!(nearest_rank(&[4, 4, 4], 30.0), 4);
        assert_eq!(nearest_rank(&[1, 2, 3], 50.0), 2);
    }

    #[test]
    fn derived_tau_floored_at_one() {
        let seq = GraphSequence::from_batches(false, &[Batch::new(&["a", "b", "c"], &[])]).unwrap();
        assert_eq!(derive_tau(&seq, 90.0).unwrap(), 1);
        assert!(matches!(
            derive_tau(&seq, 100.0),
            Err(HarnessError::InvalidPercentile(_))
        ));
        let star = star_sequence(&[3]);
        assert_eq!(derive_tau(&star, 99.0).unwrap(), 3);
    }

    #[test]
    fn bounds_rounding() {
        assert_eq!(
            derive_bounds(&star_sequence(&[13]), 5).unwrap(),
            DegreeBounds::Undirected { d: 15 }
        );
        assert_eq!(
            derive_bounds(&star_sequence(&[10]), 5).unwrap(),
            DegreeBounds::Undirected { d: 10 }
        );
        let empty = GraphSequence::from_batches(false, &[Batch::new(&["a"], &[])]).unwrap();
        assert_eq!(derive_bounds(&empty, 5).unwrap(), DegreeBounds::Undirected { d: 5 });
        assert!(derive_bounds(&empty, 0).is_err());
        assert_eq!(default_tuning_grid(&star_sequence(&[13]), 5).unwrap().len(), 3);
    }

    #[test]
    fn directed_bounds_rounding() {
        // in-degree 12 at one node, out-degree 8 at another
        let mut nodes = vec!["sink".to_string(), "src".to_string()];
        let mut edges = Vec::new();
        for i in 0..12 {
            nodes.push(format!("i{i}"));
            edges.push((format!("i{i}"), "sink".to_string()));
        }
        for i in 0..8 {
            nodes.push(format!("o{i}"));
            edges.push(("src".to_string(), format!("o{i}")));
        }
        let seq = GraphSequence::from_batches(true, &[Batch { nodes, edges }]).unwrap();
        assert_eq!(
            derive_bounds(&seq, 5).unwrap(),
            DegreeBounds::Directed { d_in: 15, d_out: 10 }
        );
        assert_eq!(default_tuning_grid(&seq, 5).unwrap().len(), 6);
    }

    #[test]
    fn zero_noise_experiment_scores_zero() {
        let mut batches = vec![Batch::new(&["a", "b"], &[("a", "b")])];
        for i in 0..4 {
            let n = format!("n{i}");
            batches.push(Batch::new(&[n.as_str()], &[("a", n.as_str())]));
        }
        let seq = GraphSequence::from_batches(false, &batches).unwrap();
        let mut cfg = ExperimentConfig::new(
            DatasetSource::Inline {
                name: "toy".into(),
                seq,
            },
            "edge".parse().unwrap(),
        );
        cfg.zero_noise = true;
        cfg.timing = false;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.rel_l1_error == 0.0));
    }

    #[test]
    fn csv_header() {
        let report = ExperimentReport {
            rows: vec![ResultRow {
                dataset: "d".into(),
                query: "edge".into(),
                mechanism: "sensdiff".into(),
                epsilon: 1.0,
                releases: 2,
                trial: 0,
                rel_l1_error: 0.5,
                skipped_terms: 0,
                wall_ms: 0.0,
            }],
            summary: vec![],
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "dataset,query,mechanism,epsilon,T,trial,rel_l1_error,skipped_terms,wall_ms"
        );
    }
}
