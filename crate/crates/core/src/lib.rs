//! Differentially private continual release of graph statistics.
//!
//! A [`GraphSequence`] grows by arrival batches. The `sensdiff` mechanism
//! perturbs the difference sequence `f(G_1), f(G_2) - f(G_1), ...` with
//! Laplace noise calibrated to its global sensitivity under a public degree
//! bound and releases the running sums. Two composition baselines, the
//! sensitivity catalog with a brute-force certifier, degree-bounding
//! projection, synthetic generators and an experiment harness complete the
//! crate.

pub mod edgelist;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod mechanisms;
pub mod projection;
pub mod sensitivity;
pub mod statistics;

pub use graph::{
    Batch, BoundViolation, BoundsVerdict, DegreeBounds, DegreeKind, GraphError, GraphSequence, GraphView, NodeIx,
};
pub use mechanisms::{MechanismConfig, MechanismError, MechanismKind, ReleaseSeries, SeriesValues};
pub use projection::{EdgeOrdering, ProjectionError, ProjectionThresholds};
pub use sensitivity::{Regime, SensitivityError, SensitivityReport};
pub use statistics::{Histogram, Pattern, StatError, StatValue, StatisticQuery};
