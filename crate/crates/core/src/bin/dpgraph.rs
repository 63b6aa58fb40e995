use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dpgraph::edgelist::{self, LoadOptions};
use dpgraph::generators::{PaTransmissionParams, SirParams};
use dpgraph::harness::{self, BoundRule, DatasetSource, ExperimentConfig, MechanismTemplate, TauRule};
use dpgraph::mechanisms::{self, MechanismConfig, MechanismKind, SeriesValues};
use dpgraph::projection::ProjectionThresholds;
use dpgraph::sensitivity;
use dpgraph::{DegreeBounds, GraphSequence, StatisticQuery};

#[derive(Parser)]
#[command(name = "dpgraph", version, about = "Private continual release of graph statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph sequence in edge-list format.
    Generate(GenerateArgs),
    /// Print the sensitivity of a statistic as JSON.
    Sensitivity(SensitivityArgs),
    /// Run one mechanism once and print the released series.
    Release(ReleaseArgs),
    /// Run a grid of mechanisms, budgets and trials and report errors.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Synthetic {
    Synthetic1,
    Synthetic2,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Diff,
    PerRelease,
    Projected,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MechanismArg {
    Sensdiff,
    ComposeBounded,
    ComposeProjection,
}

impl MechanismArg {
    fn template(self) -> MechanismTemplate {
        match self {
            MechanismArg::Sensdiff => MechanismTemplate::SensDiff,
            MechanismArg::ComposeBounded => MechanismTemplate::ComposeBounded,
            MechanismArg::ComposeProjection => MechanismTemplate::ComposeProjection { candidates: None },
        }
    }
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    /// Seed of the generator (not of the noise).
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    /// Synthetic I: initial papers.
    #[arg(long)]
    m0: Option<usize>,
    /// Synthetic I: papers per year.
    #[arg(long)]
    per_year: Option<usize>,
    /// Synthetic I: number of years.
    #[arg(long)]
    years: Option<usize>,
    /// Synthetic I: references per paper.
    #[arg(long)]
    refs: Option<usize>,
    /// Synthetic I: probability that a new paper cites nothing.
    #[arg(long)]
    p_isolated: Option<f64>,
    /// Synthetic I: exponent of the age decay.
    #[arg(long)]
    decay: Option<f64>,
    /// Synthetic II: population size.
    #[arg(long)]
    population: Option<usize>,
    /// Synthetic II: edges per node of the contact graph.
    #[arg(long)]
    attach: Option<usize>,
    /// Synthetic II: recovery probability per step.
    #[arg(long)]
    p_recover: Option<f64>,
    /// Synthetic II: infection probability per exposure.
    #[arg(long)]
    p_infect: Option<f64>,
    /// Synthetic II: initially infected individuals.
    #[arg(long)]
    initial_infected: Option<usize>,
    /// Synthetic II: number of steps.
    #[arg(long)]
    max_steps: Option<usize>,
}

impl GeneratorArgs {
    fn synthetic1(&self) -> PaTransmissionParams {
        let d = PaTransmissionParams::default();
        PaTransmissionParams {
            m0: self.m0.unwrap_or(d.m0),
            per_year: self.per_year.unwrap_or(d.per_year),
            years: self.years.unwrap_or(d.years),
            k: self.refs.unwrap_or(d.k),
            p_isolated: self.p_isolated.unwrap_or(d.p_isolated),
            decay: self.decay.unwrap_or(d.decay),
            seed: self.graph_seed,
        }
    }

    fn synthetic2(&self) -> SirParams {
        let d = SirParams::default();
        SirParams {
            population: self.population.unwrap_or(d.population),
            attach: self.attach.unwrap_or(d.attach),
            p_recover: self.p_recover.unwrap_or(d.p_recover),
            p_infect: self.p_infect.unwrap_or(d.p_infect),
            initial_infected: self.initial_infected.unwrap_or(d.initial_infected),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            seed: self.graph_seed,
        }
    }

    fn source(&self, which: Synthetic) -> DatasetSource {
        match which {
            Synthetic::Synthetic1 => DatasetSource::Synthetic1(self.synthetic1()),
            Synthetic::Synthetic2 => DatasetSource::Synthetic2(self.synthetic2()),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Synthetic,
    #[command(flatten)]
    params: GeneratorArgs,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Edge-list file to load.
    #[arg(long, short, conflicts_with = "dataset")]
    input: Option<PathBuf>,
    /// Built-in synthetic dataset.
    #[arg(long, value_enum)]
    dataset: Option<Synthetic>,
    /// Map time stamp `y` to step `max(y - origin + 1, 1)`.
    #[arg(long, allow_negative_numbers = true)]
    time_origin: Option<i64>,
    /// Drop edge directions.
    #[arg(long)]
    undirected: bool,
    #[command(flatten)]
    params: GeneratorArgs,
}

impl DatasetArgs {
    fn source(&self) -> Result<DatasetSource> {
        match (&self.input, self.dataset) {
            (Some(path), _) => Ok(DatasetSource::EdgeList {
                path: path.clone(),
                options: LoadOptions {
                    time_origin: self.time_origin,
                },
            }),
            (None, Some(which)) => Ok(self.params.source(which)),
            (None, None) => bail!("either --input or --dataset is required"),
        }
    }

    fn load(&self) -> Result<(DatasetSource, GraphSequence)> {
        let source = self.source()?;
        let mut seq = source.load().with_context(|| format!("loading {}", source.name()))?;
        if self.undirected {
            seq = seq.to_undirected();
        }
        Ok((source, seq))
    }
}

#[derive(Args, Clone)]
struct StatisticArgs {
    /// Statistic, e.g. `edge`, `high_degree`, `high_degree:3`, `k_star:2`,
    /// `triangle_I`, `degree_histogram`.
    #[arg(long, short)]
    statistic: String,
    /// Degree threshold for `high_degree`.
    #[arg(long, conflicts_with = "tau_percentile")]
    tau: Option<usize>,
    /// Derive the `high_degree` threshold as this percentile of final degrees.
    #[arg(long)]
    tau_percentile: Option<f64>,
}

impl StatisticArgs {
    /// The query with a placeholder threshold for bare `high_degree`, and
    /// the rule that resolves it.
    fn parse(&self) -> Result<(StatisticQuery, Option<TauRule>)> {
        let explicit = self.tau.map(TauRule::Explicit);
        let percentile = self.tau_percentile.map(TauRule::Percentile);
        if self.statistic == "high_degree" {
            let rule = explicit.or(percentile).unwrap_or(TauRule::Percentile(90.0));
            return Ok((StatisticQuery::HighDegree { tau: 1 }, Some(rule)));
        }
        let query: StatisticQuery = self.statistic.parse()?;
        if (explicit.is_some() || percentile.is_some()) && !matches!(query, StatisticQuery::HighDegree { .. }) {
            bail!("--tau and --tau-percentile only apply to high_degree");
        }
        Ok((query, explicit.or(percentile)))
    }

    fn resolve(&self, seq: &GraphSequence) -> Result<StatisticQuery> {
        let (query, rule) = self.parse()?;
        Ok(match (query, rule) {
            (StatisticQuery::HighDegree { .. }, Some(TauRule::Explicit(tau))) => StatisticQuery::HighDegree { tau },
            (StatisticQuery::HighDegree { .. }, Some(TauRule::Percentile(p))) => StatisticQuery::HighDegree {
                tau: harness::derive_tau(seq, p)?,
            },
            (q, _) => q,
        })
    }
}

#[derive(Args)]
struct SensitivityArgs {
    /// Statistic with its parameter, e.g. `high_degree:3` or `k_star:2`.
    #[arg(long, short)]
    statistic: String,
    /// `D` for undirected graphs or `D_in:D_out` for directed ones.
    #[arg(long)]
    degree_bound: Option<DegreeBounds>,
    /// Projection thresholds for `--regime projected`.
    #[arg(long)]
    projection_thresholds: Option<ProjectionThresholds>,
    #[arg(long, value_enum, default_value = "diff")]
    regime: RegimeArg,
}

#[derive(Args)]
struct BoundArgs {
    /// `D` or `D_in:D_out`; measured from the data when omitted.
    #[arg(long, conflicts_with = "bound_granularity")]
    degree_bound: Option<DegreeBounds>,
    /// Round measured maximum degrees up to a multiple of this.
    #[arg(long, default_value_t = 5)]
    bound_granularity: usize,
}

impl BoundArgs {
    fn rule(&self) -> BoundRule {
        match self.degree_bound {
            Some(b) => BoundRule::Explicit(b),
            None => BoundRule::Measured {
                granularity: self.bound_granularity,
            },
        }
    }
}

#[derive(Args)]
struct ReleaseArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[command(flatten)]
    stat: StatisticArgs,
    #[command(flatten)]
    bounds: BoundArgs,
    #[arg(long, value_enum, default_value = "sensdiff")]
    mechanism: MechanismArg,
    /// Projection thresholds; repeat to tune over several candidates.
    /// Defaults to the tuning grid.
    #[arg(long)]
    projection_thresholds: Vec<ProjectionThresholds>,
    #[arg(long, short, default_value_t = 1.0)]
    epsilon: f64,
    /// Coarsen to this many releases.
    #[arg(long)]
    releases: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Release the exact statistic.
    #[arg(long)]
    zero_noise: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[command(flatten)]
    stat: StatisticArgs,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Mechanisms to run; all three when omitted.
    #[arg(long)]
    mechanism: Vec<MechanismArg>,
    /// Candidate thresholds for compose_projection; the tuning grid when omitted.
    #[arg(long)]
    projection_thresholds: Vec<ProjectionThresholds>,
    /// Privacy budgets; repeatable.
    #[arg(long, short, default_values_t = [1.0])]
    epsilon: Vec<f64>,
    /// Release counts; repeatable. The native horizon when omitted.
    #[arg(long)]
    releases: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    zero_noise: bool,
    /// Write 0 for wall time so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Per-trial rows; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let seq = args.params.source(args.kind).load()?;
    let mut out = open_output(&args.output)?;
    out.write_all(edgelist::write_edge_list(&seq).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn sensitivity_cmd(args: &SensitivityArgs) -> Result<()> {
    let query: StatisticQuery = args.statistic.parse()?;
    let report = match args.regime {
        RegimeArg::Diff | RegimeArg::PerRelease => {
            let bounds = args.degree_bound.context("--degree-bound is required")?;
            if matches!(args.regime, RegimeArg::Diff) {
                sensitivity::diff_sequence_sensitivity(&query, &bounds)?
            } else {
                sensitivity::per_release_sensitivity(&query, &bounds)?
            }
        }
        RegimeArg::Projected => {
            let th = args
                .projection_thresholds
                .context("--projection-thresholds is required")?;
            sensitivity::projected_sensitivity(&query, &th)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

#[derive(Serialize)]
struct ReleaseOutput<'a> {
    dataset: String,
    query: String,
    epsilon: f64,
    release: &'a mechanisms::ReleaseSeries,
    truth: &'a SeriesValues,
}

fn release_cmd(args: &ReleaseArgs) -> Result<()> {
    let (source, mut seq) = args.data.load()?;
    if let Some(t) = args.releases {
        seq = seq.coarsen(t)?;
    }
    let query = args.stat.resolve(&seq)?;
    let bounds = match args.bounds.rule() {
        BoundRule::Explicit(b) => b,
        BoundRule::Measured { granularity } => harness::derive_bounds(&seq, granularity)?,
    };
    let kind = match args.mechanism {
        MechanismArg::Sensdiff => MechanismKind::SensDiff,
        MechanismArg::ComposeBounded => MechanismKind::ComposeBounded,
        MechanismArg::ComposeProjection => MechanismKind::ComposeProjection {
            candidates: if args.projection_thresholds.is_empty() {
                harness::default_tuning_grid(&seq, args.bounds.bound_granularity)?
            } else {
                args.projection_thresholds.clone()
            },
        },
    };
    let cfg = MechanismConfig {
        epsilon: args.epsilon,
        kind,
        bounds,
        seed: args.seed,
        trial_id: args.trial,
        zero_noise: args.zero_noise,
    };
    let series = mechanisms::release(&seq, &query, &cfg)?;
    let truth = harness::truth_series(&seq, &query)?;

    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Json => {
            let doc = ReleaseOutput {
                dataset: source.name(),
                query: query.to_string(),
                epsilon: args.epsilon,
                release: &series,
                truth: &truth,
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            match (&series.releases, &truth) {
                (SeriesValues::Scalar(rel), SeriesValues::Scalar(exact)) => {
                    w.write_record(["t", "released", "exact"])?;
                    for (t, (r, e)) in rel.iter().zip(exact).enumerate() {
                        w.write_record([(t + 1).to_string(), r.to_string(), e.to_string()])?;
                    }
                }
                (SeriesValues::Histogram(rel), SeriesValues::Histogram(exact)) => {
                    w.write_record(["t", "degree", "released", "exact"])?;
                    for (t, (r, e)) in rel.iter().zip(exact).enumerate() {
                        for d in 0..r.len().max(e.len()) {
                            let get = |v: &Vec<f64>| v.get(d).copied().unwrap_or(0.0).to_string();
                            w.write_record([(t + 1).to_string(), d.to_string(), get(r), get(e)])?;
                        }
                    }
                }
                _ => bail!("released and exact series have different shapes"),
            }
            w.flush()?;
        }
    }
    drop(out);
    eprintln!(
        "{} {}: sensitivity {} ({}), noise scale {:.4}",
        series.mechanism, query, series.sensitivity.value, series.sensitivity.formula_id, series.noise_scale
    );
    Ok(())
}

fn experiment_cmd(args: &ExperimentArgs) -> Result<()> {
    let (query, tau_rule) = args.stat.parse()?;
    let mut mechanisms: Vec<MechanismTemplate> = if args.mechanism.is_empty() {
        vec![
            MechanismTemplate::SensDiff,
            MechanismTemplate::ComposeBounded,
            MechanismTemplate::ComposeProjection { candidates: None },
        ]
    } else {
        args.mechanism.iter().map(|m| m.template()).collect()
    };
    if !args.projection_thresholds.is_empty() {
        for m in &mut mechanisms {
            if let MechanismTemplate::ComposeProjection { candidates } = m {
                *candidates = Some(args.projection_thresholds.clone());
            }
        }
    }
    let cfg = ExperimentConfig {
        dataset: args.data.source()?,
        query,
        tau_rule,
        bound_rule: args.bounds.rule(),
        mechanisms,
        epsilons: args.epsilon.clone(),
        releases: args.releases.clone(),
        trials: args.trials,
        seed: args.seed,
        zero_noise: args.zero_noise,
        undirected: args.data.undirected,
        timing: !args.no_timing,
    };
    let report = harness::run_experiment(&cfg)?;

    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Csv => report.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    drop(out);

    let mut err = io::stderr().lock();
    writeln!(
        err,
        "{:<20} {:>8} {:>5} {:>12} {:>12} {:>6}",
        "mechanism", "epsilon", "T", "mean", "std", "GS"
    )?;
    for s in &report.summary {
        writeln!(
            err,
            "{:<20} {:>8} {:>5} {:>12.4} {:>12.4} {:>6}",
            s.mechanism, s.epsilon, s.releases, s.mean, s.std, s.sensitivity
        )?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Sensitivity(a) => sensitivity_cmd(a),
        Command::Release(a) => release_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
    }
}
