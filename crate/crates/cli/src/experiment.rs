//! Experiment specs, solver comparison runs and artifact emission.
//!
//! A run takes an [`ExperimentSpec`] and writes four artifacts into the
//! output directory:
//!
//! * `summary.csv` — one row per (instance, solver): final value, guarantee
//!   certificate fields, exact oracles where available, and the final point.
//! * `trajectories.csv` — one row per recorded step of every run.
//! * `manifest.json` — the fully resolved spec; feeding it back through
//!   `compare` reproduces both CSV files bit-for-bit.
//! * `timings.json` — wall-clock seconds per run. Timings live outside the
//!   CSVs precisely so the CSVs stay reproducible.
//!
//! All solvers in a run share the experiment seed, so they process the
//! coordinates in the same random order within each epoch.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dgmf::bounds::{
    exact_log_partition, exact_pa_objective, log_partition_upper, UpperBoundStrategy,
};
use dgmf::domain::{DrObjective, Point};
use dgmf::multilinear::MultilinearOracle;
use dgmf::objectives::{ElboObjective, PaElboObjective};
use dgmf::rng::splitmix64;
use dgmf::set_functions::{SetFunction, ENUMERATION_LIMIT};
use dgmf::solvers::{
    coordinate_ascent, dg_mean_field, dr_double_greedy, submodular_double_greedy,
    CoordinateOrder, DgVariant, GuaranteeKind, Init, SolverConfig, SolverReport, Trajectory,
};

use crate::model_io::{load_model, synth_flid, SyntheticFlidSpec};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveSpec {
    Elbo,
    PaElbo {
        #[serde(default = "default_beta")]
        beta: f64,
    },
}

fn default_beta() -> f64 {
    1.0
}

impl ObjectiveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveSpec::Elbo => "elbo",
            ObjectiveSpec::PaElbo { .. } => "pa-elbo",
        }
    }
}

/// Where a model comes from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSource {
    File { path: PathBuf },
    SynthFlid(SyntheticFlidSpec),
}

impl ModelSource {
    fn load(&self) -> Result<SetFunction<f64>> {
        match self {
            ModelSource::File { path } => load_model(path),
            ModelSource::SynthFlid(spec) => Ok(SetFunction::Flid(synth_flid(spec)?)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub name: String,
    /// One source for the ELBO objective, exactly two for PA-ELBO.
    pub models: Vec<ModelSource>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub enum SolverKind {
    #[serde(rename = "dr-dg")]
    DrDoubleGreedy,
    #[serde(rename = "sub-dg")]
    SubmodularDoubleGreedy,
    #[serde(rename = "ca-0")]
    CoordinateAscentZeros,
    #[serde(rename = "ca-1")]
    CoordinateAscentOnes,
    #[serde(rename = "ca-random")]
    CoordinateAscentRandom,
    #[serde(rename = "dg-mf-half")]
    DgMeanFieldHalf,
    #[serde(rename = "dg-mf-third")]
    DgMeanFieldThird,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::DrDoubleGreedy => "dr-dg",
            SolverKind::SubmodularDoubleGreedy => "sub-dg",
            SolverKind::CoordinateAscentZeros => "ca-0",
            SolverKind::CoordinateAscentOnes => "ca-1",
            SolverKind::CoordinateAscentRandom => "ca-random",
            SolverKind::DgMeanFieldHalf => "dg-mf-half",
            SolverKind::DgMeanFieldThird => "dg-mf-third",
        }
    }

    pub fn all() -> [SolverKind; 7] {
        [
            SolverKind::DrDoubleGreedy,
            SolverKind::SubmodularDoubleGreedy,
            SolverKind::CoordinateAscentZeros,
            SolverKind::CoordinateAscentOnes,
            SolverKind::CoordinateAscentRandom,
            SolverKind::DgMeanFieldHalf,
            SolverKind::DgMeanFieldThird,
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub kind: SolverKind,
    /// Row label in the CSVs; defaults to the kind name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Epoch override for this solver; defaults to the spec-wide `epochs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
}

impl From<SolverKind> for SolverSpec {
    fn from(kind: SolverKind) -> Self {
        SolverSpec { kind, name: None, epochs: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrderSpec {
    #[default]
    Random,
    Identity,
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectorySpec {
    #[default]
    PerEpoch,
    PerCoordinate,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub objective: ObjectiveSpec,
    pub instances: Vec<InstanceSpec>,
    /// PA-ELBO convenience: a list of fold models expanded into one instance
    /// per unordered pair (fold0-fold1, fold0-fold2, ...), in addition to the
    /// explicit instances.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fold_pairs: Vec<ModelSource>,
    pub solvers: Vec<SolverSpec>,
    /// Master seed: per-epoch coordinate orders and random initializers
    /// derive from it, identically for every solver.
    pub seed: u64,
    /// Default epoch count for the multi-epoch solvers.
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub order: OrderSpec,
    #[serde(default)]
    pub trajectory: TrajectorySpec,
    /// Compute exact log-partitions / PA objectives by enumeration whenever
    /// n <= 20.
    #[serde(default = "default_true")]
    pub exact_oracles: bool,
    /// Record the per-step inequality checks into the assertion log and fail
    /// the instance if any is violated.
    #[serde(default)]
    pub assertions: bool,
}

fn default_epochs() -> usize {
    6
}

fn default_true() -> bool {
    true
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    pub solver: String,
    pub n: usize,
    pub objective: String,
    pub final_value: f64,
    pub guarantee: Option<GuaranteeKind>,
    pub value_at_lower: Option<f64>,
    pub value_at_upper: Option<f64>,
    pub one_d_error: Option<f64>,
    pub exact_log_z: Option<f64>,
    pub pa_lower_bound: Option<f64>,
    pub exact_pa: Option<f64>,
    pub final_x: Vec<f64>,
}

/// One row of `trajectories.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub instance: String,
    pub solver: String,
    pub step: usize,
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingRow {
    pub instance: String,
    pub solver: String,
    pub seconds: f64,
}

/// An instance that had to be skipped, with the reason.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct InstanceFailure {
    pub instance: String,
    pub reason: String,
}

/// In-memory result of executing a spec.
#[derive(Debug)]
pub struct Execution {
    pub summary: Vec<SummaryRow>,
    pub trajectories: Vec<TrajectoryRow>,
    pub timings: Vec<TimingRow>,
    /// Instances aborted by a component error; the remaining instances still
    /// ran to completion.
    pub failures: Vec<InstanceFailure>,
}

/// Everything a run produced, including the artifact paths.
#[derive(Debug)]
pub struct RunArtifacts {
    pub summary: Vec<SummaryRow>,
    pub summary_path: PathBuf,
    pub trajectory_path: PathBuf,
    pub manifest_path: PathBuf,
    pub timings_path: PathBuf,
}

/// The objective for one instance, built from its loaded models.
enum BuiltObjective {
    Elbo(ElboObjective<f64>),
    PaElbo(PaElboObjective<f64>),
}

impl BuiltObjective {
    fn as_dyn(&self) -> &dyn DrObjective<f64> {
        match self {
            BuiltObjective::Elbo(o) => o,
            BuiltObjective::PaElbo(o) => o,
        }
    }
}

fn resolve_order(spec: &ExperimentSpec) -> Result<CoordinateOrder> {
    Ok(match &spec.order {
        OrderSpec::Random => CoordinateOrder::Random { seed: spec.seed },
        OrderSpec::Identity => CoordinateOrder::Identity,
        OrderSpec::File { path } => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading order file {}", path.display()))?;
            let perm: Vec<usize> = serde_json::from_str(&text)
                .with_context(|| format!("parsing order file {}", path.display()))?;
            CoordinateOrder::Explicit(perm)
        }
    })
}

/// The explicit instances plus one instance per unordered pair of
/// `fold_pairs` entries.
pub fn expanded_instances(spec: &ExperimentSpec) -> Result<Vec<InstanceSpec>> {
    let mut instances = spec.instances.clone();
    if !spec.fold_pairs.is_empty() {
        if !matches!(spec.objective, ObjectiveSpec::PaElbo { .. }) {
            bail!("fold_pairs expansion requires the pa-elbo objective");
        }
        if spec.fold_pairs.len() < 2 {
            bail!("fold_pairs needs at least two folds to form a pair");
        }
        for i in 0..spec.fold_pairs.len() {
            for j in (i + 1)..spec.fold_pairs.len() {
                instances.push(InstanceSpec {
                    name: format!("fold{i}-fold{j}"),
                    models: vec![spec.fold_pairs[i].clone(), spec.fold_pairs[j].clone()],
                });
            }
        }
    }
    Ok(instances)
}

pub fn validate_spec(spec: &ExperimentSpec) -> Result<()> {
    if spec.solvers.is_empty() {
        bail!("solver list is empty");
    }
    let instances = expanded_instances(spec)?;
    if instances.is_empty() {
        bail!("instance list is empty");
    }
    let mut names: Vec<String> = Vec::new();
    for solver in &spec.solvers {
        let name = solver.name.clone().unwrap_or_else(|| solver.kind.name().to_string());
        if names.contains(&name) {
            bail!("duplicate solver name {name:?}");
        }
        names.push(name);
        if solver.epochs == Some(0) || spec.epochs == 0 {
            bail!("epoch counts must be >= 1");
        }
    }
    let mut instance_names: Vec<&str> = Vec::new();
    for instance in &instances {
        if instance_names.contains(&instance.name.as_str()) {
            bail!("duplicate instance name {:?}", instance.name);
        }
        instance_names.push(&instance.name);
        let expected = match spec.objective {
            ObjectiveSpec::Elbo => 1,
            ObjectiveSpec::PaElbo { .. } => 2,
        };
        if instance.models.len() != expected {
            bail!(
                "instance {:?} supplies {} model(s); the {} objective needs exactly {expected}",
                instance.name,
                instance.models.len(),
                spec.objective.name()
            );
        }
    }
    Ok(())
}

fn build_objective(
    spec: &ExperimentSpec,
    models: &[SetFunction<f64>],
) -> Result<BuiltObjective> {
    Ok(match spec.objective {
        ObjectiveSpec::Elbo => {
            BuiltObjective::Elbo(ElboObjective::new(MultilinearOracle::auto(models[0].clone())?))
        }
        ObjectiveSpec::PaElbo { beta } => BuiltObjective::PaElbo(PaElboObjective::new(
            MultilinearOracle::auto(models[0].clone())?,
            MultilinearOracle::auto(models[1].clone())?,
            beta,
        )?),
    })
}

fn run_solver(
    objective: &BuiltObjective,
    solver: &SolverSpec,
    cfg: &SolverConfig<f64>,
    instance_index: usize,
    master_seed: u64,
) -> Result<SolverReport<f64>> {
    let obj = objective.as_dyn();
    Ok(match solver.kind {
        SolverKind::DrDoubleGreedy => dr_double_greedy(obj, cfg)?,
        SolverKind::SubmodularDoubleGreedy => submodular_double_greedy(obj, cfg)?,
        SolverKind::CoordinateAscentZeros => coordinate_ascent(obj, &Init::Lower, cfg)?,
        SolverKind::CoordinateAscentOnes => coordinate_ascent(obj, &Init::Upper, cfg)?,
        SolverKind::CoordinateAscentRandom => {
            let seed = splitmix64(master_seed ^ instance_index as u64);
            coordinate_ascent(obj, &Init::Uniform { seed }, cfg)?
        }
        SolverKind::DgMeanFieldHalf => dg_mean_field(obj, DgVariant::Half, cfg)?,
        SolverKind::DgMeanFieldThird => dg_mean_field(obj, DgVariant::Third, cfg)?,
    })
}

/// Exact oracle values shared by every solver row of one instance.
struct InstanceOracles {
    exact_log_z: Option<f64>,
    exact_pa: Option<f64>,
    /// Sum of the per-fold upper bounds on ln Z, for PA lower bounds.
    pa_upper_sum: Option<f64>,
}

fn instance_oracles(
    spec: &ExperimentSpec,
    models: &[SetFunction<f64>],
) -> Result<InstanceOracles> {
    let n = models[0].ground_size();
    let enumerable = spec.exact_oracles && n <= ENUMERATION_LIMIT;
    Ok(match spec.objective {
        ObjectiveSpec::Elbo => InstanceOracles {
            exact_log_z: if enumerable {
                Some(exact_log_partition(&models[0], 1.0)?)
            } else {
                None
            },
            exact_pa: None,
            pa_upper_sum: None,
        },
        ObjectiveSpec::PaElbo { beta } => {
            let strategy = if n <= ENUMERATION_LIMIT {
                UpperBoundStrategy::Exhaustive
            } else {
                UpperBoundStrategy::LocalSearch { seed: spec.seed, restarts: 8 }
            };
            let (u1, _) = log_partition_upper(&models[0], beta, &strategy)?;
            let (u2, _) = log_partition_upper(&models[1], beta, &strategy)?;
            InstanceOracles {
                exact_log_z: None,
                exact_pa: if enumerable {
                    Some(exact_pa_objective(&models[0], &models[1], beta)?)
                } else {
                    None
                },
                pa_upper_sum: Some(u1 + u2),
            }
        }
    })
}

/// All rows produced by one instance; committed only when the whole
/// instance succeeds.
struct InstanceRows {
    summary: Vec<SummaryRow>,
    trajectories: Vec<TrajectoryRow>,
    timings: Vec<TimingRow>,
}

fn run_instance(
    spec: &ExperimentSpec,
    order: &CoordinateOrder,
    instance: &InstanceSpec,
    instance_index: usize,
) -> Result<InstanceRows> {
    let models: Vec<SetFunction<f64>> = instance
        .models
        .iter()
        .map(|source| source.load())
        .collect::<Result<_>>()
        .context("loading models")?;
    let n = models[0].ground_size();
    let objective = build_objective(spec, &models).context("building the objective")?;
    let oracles = instance_oracles(spec, &models)?;

    let mut rows =
        InstanceRows { summary: Vec::new(), trajectories: Vec::new(), timings: Vec::new() };
    for solver in &spec.solvers {
        let solver_name = solver.name.clone().unwrap_or_else(|| solver.kind.name().to_string());
        let mut cfg = SolverConfig::<f64>::with_order(order.clone());
        cfg.epochs = solver.epochs.unwrap_or(spec.epochs);
        cfg.assertions = spec.assertions;
        cfg.trajectory = match spec.trajectory {
            TrajectorySpec::PerEpoch => Trajectory::PerEpoch,
            TrajectorySpec::PerCoordinate => Trajectory::PerCoordinate,
        };

        let started = Instant::now();
        let report = run_solver(&objective, solver, &cfg, instance_index, spec.seed)
            .with_context(|| format!("running {solver_name}"))?;
        let seconds = started.elapsed().as_secs_f64();

        if spec.assertions && !report.assertions_passed() {
            bail!(
                "inequality checks failed for {solver_name}: {:?}",
                report.failed_assertions().collect::<Vec<_>>()
            );
        }

        for (step, (label, value)) in report.trajectory.iter().enumerate() {
            rows.trajectories.push(TrajectoryRow {
                instance: instance.name.clone(),
                solver: solver_name.clone(),
                step,
                label: label.clone(),
                value: *value,
            });
        }
        rows.timings.push(TimingRow {
            instance: instance.name.clone(),
            solver: solver_name.clone(),
            seconds,
        });
        rows.summary.push(SummaryRow {
            instance: instance.name.clone(),
            solver: solver_name,
            n,
            objective: spec.objective.name().to_string(),
            final_value: report.final_value,
            guarantee: report.certificate.map(|c| c.kind),
            value_at_lower: report.certificate.map(|c| c.value_at_lower),
            value_at_upper: report.certificate.map(|c| c.value_at_upper),
            one_d_error: report.certificate.map(|c| c.one_d_error),
            exact_log_z: oracles.exact_log_z,
            pa_lower_bound: oracles.pa_upper_sum.map(|u| report.final_value - u),
            exact_pa: oracles.exact_pa,
            final_x: report.final_x.as_slice().to_vec(),
        });
    }
    Ok(rows)
}

/// Runs the full comparison in memory. A component error aborts its
/// instance with a recorded reason; the remaining instances proceed.
pub fn execute(spec: &ExperimentSpec) -> Result<Execution> {
    validate_spec(spec)?;
    let order = resolve_order(spec)?;
    let instances = expanded_instances(spec)?;

    let mut execution = Execution {
        summary: Vec::new(),
        trajectories: Vec::new(),
        timings: Vec::new(),
        failures: Vec::new(),
    };
    for (instance_index, instance) in instances.iter().enumerate() {
        match run_instance(spec, &order, instance, instance_index) {
            Ok(rows) => {
                execution.summary.extend(rows.summary);
                execution.trajectories.extend(rows.trajectories);
                execution.timings.extend(rows.timings);
            }
            Err(err) => {
                let reason = format!("{err:#}");
                eprintln!("instance {:?} aborted: {reason}", instance.name);
                execution
                    .failures
                    .push(InstanceFailure { instance: instance.name.clone(), reason });
            }
        }
    }
    Ok(execution)
}

/// Runs the full comparison and writes all artifacts under `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunArtifacts> {
    let execution = execute(spec)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let summary_path = out_dir.join("summary.csv");
    write_summary_csv(&summary_path, &execution.summary)?;
    let trajectory_path = out_dir.join("trajectories.csv");
    write_trajectory_csv(&trajectory_path, &execution.trajectories)?;
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&resolved_spec(spec))?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    let timings_path = out_dir.join("timings.json");
    fs::write(&timings_path, serde_json::to_string_pretty(&execution.timings)?)
        .with_context(|| format!("writing {}", timings_path.display()))?;
    if !execution.failures.is_empty() {
        let failures_path = out_dir.join("failures.json");
        fs::write(&failures_path, serde_json::to_string_pretty(&execution.failures)?)
            .with_context(|| format!("writing {}", failures_path.display()))?;
    }

    Ok(RunArtifacts {
        summary: execution.summary,
        summary_path,
        trajectory_path,
        manifest_path,
        timings_path,
    })
}

/// The manifest form of a spec: solver names, epoch counts and fold-pair
/// expansion pinned, so a rerun resolves to exactly the same configuration.
fn resolved_spec(spec: &ExperimentSpec) -> ExperimentSpec {
    let mut resolved = spec.clone();
    resolved.instances = expanded_instances(spec).expect("spec was validated");
    resolved.fold_pairs.clear();
    for solver in &mut resolved.solvers {
        solver.name = Some(solver.name.clone().unwrap_or_else(|| solver.kind.name().to_string()));
        solver.epochs = Some(solver.epochs.unwrap_or(spec.epochs));
    }
    resolved
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading experiment spec {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing experiment spec {}", path.display()))
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

pub fn parse_point(text: &str) -> Result<Point<f64>> {
    let coords: Vec<f64> = text
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;
    Ok(Point::new(coords))
}

fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writer.write_record([
        "instance",
        "solver",
        "n",
        "objective",
        "final_value",
        "guarantee",
        "value_at_lower",
        "value_at_upper",
        "one_d_error",
        "exact_log_z",
        "pa_lower_bound",
        "exact_pa",
        "final_x",
    ])?;
    for row in rows {
        writer.write_record([
            row.instance.as_str(),
            row.solver.as_str(),
            &row.n.to_string(),
            row.objective.as_str(),
            &fmt_f64(row.final_value),
            match row.guarantee {
                Some(GuaranteeKind::Half) => "half",
                Some(GuaranteeKind::Third) => "third",
                None => "",
            },
            &fmt_opt(row.value_at_lower),
            &fmt_opt(row.value_at_upper),
            &fmt_opt(row.one_d_error),
            &fmt_opt(row.exact_log_z),
            &fmt_opt(row.pa_lower_bound),
            &fmt_opt(row.exact_pa),
            &fmt_point(&row.final_x),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_trajectory_csv(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writer.write_record(["instance", "solver", "step", "label", "value"])?;
    for row in rows {
        writer.write_record([
            row.instance.as_str(),
            row.solver.as_str(),
            &row.step.to_string(),
            row.label.as_str(),
            &fmt_f64(row.value),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
