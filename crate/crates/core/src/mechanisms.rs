//! Private release mechanisms.
//!
//! * `sensdiff` perturbs every increment of the difference sequence with
//!   `Lap(GS(Δ)/ε)` and releases the running sums.
//! * `compose_bounded` perturbs every `f(G_t)` with `Lap(GS·T/ε)`.
//! * `compose_projection` projects every snapshot separately under degree
//!   thresholds and perturbs `f(G̃_t)` with `Lap(GS̃·T/ε)`.
//!
//! The noise stream of a run is a ChaCha20 generator seeded with the master
//! seed and switched to stream `trial_id`, so runs are reproducible and
//! trials are independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{BoundViolation, BoundsVerdict, DegreeBounds, GraphError, GraphSequence};
use crate::harness::{relative_l1_error, HarnessError};
use crate::projection::{self, ProjectionError, ProjectionThresholds};
use crate::sensitivity::{self, SensitivityError, SensitivityReport};
use crate::statistics::{self, StatError, StatValue, StatisticQuery};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanismError {
    #[error("noise scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("sequence leaves the bounded domain: {0}")]
    BoundViolation(BoundViolation),
    #[error("compose_projection needs at least one threshold candidate")]
    EmptyTuningList,
    #[error("histogram releases are only available from sensdiff")]
    UnsupportedQuery(StatisticQuery),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Statistic(#[from] StatError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Scoring(#[from] HarnessError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MechanismKind {
    SensDiff,
    ComposeBounded,
    /// With several candidates the one with the smallest realized relative
    /// error is kept, without charging privacy budget for the choice.
    ComposeProjection {
        candidates: Vec<ProjectionThresholds>,
    },
}

impl MechanismKind {
    pub fn id(&self) -> &'static str {
        match self {
            MechanismKind::SensDiff => "sensdiff",
            MechanismKind::ComposeBounded => "compose_bounded",
            MechanismKind::ComposeProjection { .. } => "compose_projection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismConfig {
    pub epsilon: f64,
    pub kind: MechanismKind,
    pub bounds: DegreeBounds,
    pub seed: u64,
    pub trial_id: u64,
    /// Test mode: the noise scale is computed and recorded but no noise is
    /// drawn.
    pub zero_noise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SeriesValues {
    Scalar(Vec<f64>),
    /// One dense vector `h(0..=D)` per step.
    Histogram(Vec<Vec<f64>>),
}

impl SeriesValues {
    pub fn len(&self) -> usize {
        match self {
            SeriesValues::Scalar(v) => v.len(),
            SeriesValues::Histogram(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_scalar(&self) -> Option<&[f64]> {
        match self {
            SeriesValues::Scalar(v) => Some(v),
            SeriesValues::Histogram(_) => None,
        }
    }

    pub fn as_histogram(&self) -> Option<&[Vec<f64>]> {
        match self {
            SeriesValues::Histogram(v) => Some(v),
            SeriesValues::Scalar(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReleaseSeries {
    pub mechanism: &'static str,
    /// Noised increments for sensdiff; noised values for the baselines.
    pub increments: SeriesValues,
    /// What is published at each step.
    pub releases: SeriesValues,
    pub noise_scale: f64,
    pub sensitivity: SensitivityReport,
    /// Projection thresholds in effect, if any.
    pub thresholds: Option<ProjectionThresholds>,
}

/// Noise generator for one trial.
pub fn trial_rng(seed: u64, trial_id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_id);
    rng
}

/// One draw from the Laplace distribution with scale `b`.
pub fn laplace_sample<R: Rng + ?Sized>(b: f64, rng: &mut R) -> Result<f64, MechanismError> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(MechanismError::NonPositiveScale(b));
    }
    let u: f64 = rng.gen();
    let magnitude = -b * (1.0 - u).ln();
    Ok(if rng.gen::<bool>() { magnitude } else { -magnitude })
}

#[derive(Debug, Clone)]
enum Exact {
    Scalar(Vec<i64>),
    Histogram(Vec<Vec<i64>>),
}

fn exact_values(values: &[StatValue], width: usize) -> Exact {
    match values.first() {
        Some(StatValue::Histogram(_)) => Exact::Histogram(
            values
                .iter()
                .map(|v| {
                    let h = v.as_histogram().expect("uniform series");
                    h.to_dense(width).into_iter().map(|c| c as i64).collect()
                })
                .collect(),
        ),
        _ => Exact::Scalar(
            values
                .iter()
                .map(|v| v.as_scalar().expect("uniform series") as i64)
                .collect(),
        ),
    }
}

/// Exact statistics and calibrated sensitivity of a run, independent of the
/// noise draw. Sampling a prepared release repeatedly is how trials are run.
#[derive(Debug, Clone)]
pub struct PreparedRelease {
    mechanism: &'static str,
    report: SensitivityReport,
    exact: Exact,
    thresholds: Option<ProjectionThresholds>,
}

impl PreparedRelease {
    pub fn sensdiff(
        seq: &GraphSequence,
        query: &StatisticQuery,
        bounds: &DegreeBounds,
    ) -> Result<Self, MechanismError> {
        check_bounds(seq, bounds)?;
        let report = sensitivity::diff_sequence_sensitivity(query, bounds)?;
        let width = match *bounds {
            DegreeBounds::Undirected { d } => d + 1,
            DegreeBounds::Directed { d_out, .. } => d_out + 1,
        };
        let values = statistics::exact_series(seq, query)?;
        Ok(PreparedRelease {
            mechanism: "sensdiff",
            report,
            exact: exact_values(&values, width),
            thresholds: None,
        })
    }

    pub fn compose_bounded(
        seq: &GraphSequence,
        query: &StatisticQuery,
        bounds: &DegreeBounds,
    ) -> Result<Self, MechanismError> {
        check_bounds(seq, bounds)?;
        let report = sensitivity::per_release_sensitivity(query, bounds)?;
        let values = statistics::exact_series(seq, query)?;
        Ok(PreparedRelease {
            mechanism: "compose_bounded",
            report,
            exact: exact_values(&values, 0),
            thresholds: None,
        })
    }

    /// Every snapshot is projected on its own, with the canonical ordering
    /// restricted to its edges.
    pub fn compose_projection(
        seq: &GraphSequence,
        query: &StatisticQuery,
        thresholds: &ProjectionThresholds,
    ) -> Result<Self, MechanismError> {
        let report = sensitivity::projected_sensitivity(query, thresholds)?;
        let ord = projection::canonical_ordering(seq);
        let mut values = Vec::with_capacity(seq.horizon());
        for t in 1..=seq.horizon() {
            let g = seq.snapshot(t)?;
            let projected = projection::project_graph(&g, &ord.prefix(t), thresholds)?;
            values.push(statistics::evaluate(query, &projected)?);
        }
        Ok(PreparedRelease {
            mechanism: "compose_projection",
            report,
            exact: exact_values(&values, 0),
            thresholds: Some(*thresholds),
        })
    }

    pub fn horizon(&self) -> usize {
        match &self.exact {
            Exact::Scalar(v) => v.len(),
            Exact::Histogram(v) => v.len(),
        }
    }

    pub fn sensitivity(&self) -> &SensitivityReport {
        &self.report
    }

    /// The statistic the released values estimate without noise: `f(G_t)`,
    /// or `f(G̃_t)` for the projection baseline.
    pub fn noiseless(&self) -> SeriesValues {
        match &self.exact {
            Exact::Scalar(v) => SeriesValues::Scalar(v.iter().map(|&x| x as f64).collect()),
            Exact::Histogram(v) => {
                SeriesValues::Histogram(v.iter().map(|h| h.iter().map(|&x| x as f64).collect()).collect())
            }
        }
    }

    pub fn noise_scale(&self, epsilon: f64) -> f64 {
        let gs = self.report.value as f64;
        if self.mechanism == "sensdiff" {
            gs / epsilon
        } else {
            gs * self.horizon() as f64 / epsilon
        }
    }

    pub fn sample(
        &self,
        epsilon: f64,
        seed: u64,
        trial_id: u64,
        zero_noise: bool,
    ) -> Result<ReleaseSeries, MechanismError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(MechanismError::InvalidEpsilon(epsilon));
        }
        let scale = self.noise_scale(epsilon);
        let mut rng = trial_rng(seed, trial_id);
        let mut noise = |x: f64| -> f64 {
            if zero_noise || scale == 0.0 {
                x
            } else {
                x + laplace_sample(scale, &mut rng).expect("scale checked positive")
            }
        };
        let cumulative = self.mechanism == "sensdiff";
        let (increments, releases) = match &self.exact {
            Exact::Scalar(values) => {
                let mut inc = Vec::with_capacity(values.len());
                let mut rel = Vec::with_capacity(values.len());
                let mut prev = 0i64;
                let mut acc = 0.0;
                for &v in values {
                    if cumulative {
                        let d = noise((v - prev) as f64);
                        prev = v;
                        acc += d;
                        inc.push(d);
                        rel.push(acc);
                    } else {
                        let x = noise(v as f64);
                        inc.push(x);
                        rel.push(x);
                    }
                }
                (SeriesValues::Scalar(inc), SeriesValues::Scalar(rel))
            }
            Exact::Histogram(values) => {
                let width = values.first().map_or(0, Vec::len);
                let mut prev = vec![0i64; width];
                let mut acc = vec![0.0; width];
                let mut inc = Vec::with_capacity(values.len());
                let mut rel = Vec::with_capacity(values.len());
                for h in values {
                    let d: Vec<f64> = h.iter().zip(&prev).map(|(&c, &p)| noise((c - p) as f64)).collect();
                    for (a, x) in acc.iter_mut().zip(&d) {
                        *a += x;
                    }
                    prev.clone_from(h);
                    inc.push(d);
                    rel.push(acc.clone());
                }
                (SeriesValues::Histogram(inc), SeriesValues::Histogram(rel))
            }
        };
        Ok(ReleaseSeries {
            mechanism: self.mechanism,
            increments,
            releases,
            noise_scale: scale,
            sensitivity: self.report.clone(),
            thresholds: self.thresholds,
        })
    }
}

fn check_bounds(seq: &GraphSequence, bounds: &DegreeBounds) -> Result<(), MechanismError> {
    match seq.verify_bounds(bounds)? {
        BoundsVerdict::Ok => Ok(()),
        BoundsVerdict::Violation(v) => Err(MechanismError::BoundViolation(v)),
    }
}

pub fn sensdiff_release(
    seq: &GraphSequence,
    query: &StatisticQuery,
    cfg: &MechanismConfig,
) -> Result<ReleaseSeries, MechanismError> {
    PreparedRelease::sensdiff(seq, query, &cfg.bounds)?.sample(cfg.epsilon, cfg.seed, cfg.trial_id, cfg.zero_noise)
}

pub fn compose_bounded_release(
    seq: &GraphSequence,
    query: &StatisticQuery,
    cfg: &MechanismConfig,
) -> Result<ReleaseSeries, MechanismError> {
    if query.is_histogram() {
        return Err(MechanismError::Sensitivity(SensitivityError::UnsupportedBaselineQuery(
            *query,
        )));
    }
    PreparedRelease::compose_bounded(seq, query, &cfg.bounds)?.sample(
        cfg.epsilon,
        cfg.seed,
        cfg.trial_id,
        cfg.zero_noise,
    )
}

/// Uses the candidates of `cfg.kind`; with more than one, every candidate
/// is run on the same noise stream and the one closest to the raw
/// statistic is returned.
pub fn compose_projection_release(
    seq: &GraphSequence,
    query: &StatisticQuery,
    cfg: &MechanismConfig,
) -> Result<ReleaseSeries, MechanismError> {
    let candidates = match &cfg.kind {
        MechanismKind::ComposeProjection { candidates } => candidates.as_slice(),
        _ => &[],
    };
    if candidates.is_empty() {
        return Err(MechanismError::EmptyTuningList);
    }
    let truth: Vec<f64> = match candidates.len() {
        1 => Vec::new(),
        _ => statistics::exact_series(seq, query)?
            .iter()
            .map(|v| {
                v.as_scalar()
                    .map(|x| x as f64)
                    .ok_or(MechanismError::UnsupportedQuery(*query))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut best: Option<(f64, ReleaseSeries)> = None;
    for th in candidates {
        let run = PreparedRelease::compose_projection(seq, query, th)?.sample(
            cfg.epsilon,
            cfg.seed,
            cfg.trial_id,
            cfg.zero_noise,
        )?;
        if candidates.len() == 1 {
            return Ok(run);
        }
        let released = run.releases.as_scalar().expect("scalar query");
        let err = relative_l1_error(released, &truth)?.value;
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, run));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Dispatches on `cfg.kind`.
pub fn release(
    seq: &GraphSequence,
    query: &StatisticQuery,
    cfg: &MechanismConfig,
) -> Result<ReleaseSeries, MechanismError> {
    match cfg.kind {
        MechanismKind::SensDiff => sensdiff_release(seq, query, cfg),
        MechanismKind::ComposeBounded => compose_bounded_release(seq, query, cfg),
        MechanismKind::ComposeProjection { .. } => compose_projection_release(seq, query, cfg),
    }
}
