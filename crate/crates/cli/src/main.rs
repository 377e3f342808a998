//! `dgmf` — experiment harness for box-constrained DR-submodular
//! maximization and mean-field inference of log-submodular models.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dgmf::bounds::{
    exact_log_partition, pa_lower_bound, UpperBoundStrategy,
};
use dgmf::multilinear::MultilinearOracle;
use dgmf::rng::DetRng;
use dgmf::set_functions::{SubmodularityVerdict, ENUMERATION_LIMIT};
use dgmf::solvers::SolverConfig;
use dgmf::{DrObjective, Point};

use dgmf_cli::experiment::{
    execute, load_spec, run_experiment, ExperimentSpec, InstanceSpec, ModelSource, ObjectiveSpec,
    OrderSpec, SolverKind, SolverSpec, TrajectorySpec,
};
use dgmf_cli::model_io::{load_model, save_model, synth_flid, ModelFile, SyntheticFlidSpec};

#[derive(Parser)]
#[command(name = "dgmf", version, about = "Mean-field inference for log-submodular models via double-greedy DR-submodular maximization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Elbo,
    PaElbo,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    #[value(name = "dr-dg")]
    DrDg,
    #[value(name = "sub-dg")]
    SubDg,
    #[value(name = "ca-0")]
    Ca0,
    #[value(name = "ca-1")]
    Ca1,
    #[value(name = "ca-random")]
    CaRandom,
    #[value(name = "dg-mf-half")]
    DgMfHalf,
    #[value(name = "dg-mf-third")]
    DgMfThird,
}

impl From<SolverArg> for SolverKind {
    fn from(arg: SolverArg) -> Self {
        match arg {
            SolverArg::DrDg => SolverKind::DrDoubleGreedy,
            SolverArg::SubDg => SolverKind::SubmodularDoubleGreedy,
            SolverArg::Ca0 => SolverKind::CoordinateAscentZeros,
            SolverArg::Ca1 => SolverKind::CoordinateAscentOnes,
            SolverArg::CaRandom => SolverKind::CoordinateAscentRandom,
            SolverArg::DgMfHalf => SolverKind::DgMeanFieldHalf,
            SolverArg::DgMfThird => SolverKind::DgMeanFieldThird,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Random,
    Identity,
    File,
}

#[derive(Args)]
struct OrderFlags {
    /// Coordinate visitation order within each epoch.
    #[arg(long, value_enum, default_value = "random")]
    order: OrderArg,
    /// JSON permutation file, required with --order file.
    #[arg(long)]
    order_file: Option<PathBuf>,
}

impl OrderFlags {
    fn resolve(&self) -> Result<OrderSpec> {
        Ok(match self.order {
            OrderArg::Random => OrderSpec::Random,
            OrderArg::Identity => OrderSpec::Identity,
            OrderArg::File => {
                let path = self
                    .order_file
                    .clone()
                    .context("--order file needs --order-file <path>")?;
                OrderSpec::File { path }
            }
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// All 2^n anchor sets (n <= 20).
    Exhaustive,
    /// Restarted single-swap descent.
    LocalSearch,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one instance and print the outcome.
    Solve {
        /// Model file (first fold for pa-elbo).
        #[arg(long)]
        model: PathBuf,
        /// Second fold, required for pa-elbo.
        #[arg(long)]
        model2: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "elbo")]
        objective: ObjectiveArg,
        /// Inverse temperature of the pa-elbo objective.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, value_enum)]
        solver: SolverArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Epochs for the multi-epoch solvers.
        #[arg(long, default_value_t = 6)]
        epochs: usize,
        #[command(flatten)]
        order: OrderFlags,
        /// Record per-step inequality checks and fail on violations.
        #[arg(long = "assert")]
        assertions: bool,
        /// Also write summary/trajectory/manifest artifacts into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full comparison spec (or a manifest of a previous run).
    Compare {
        /// Experiment spec or manifest JSON.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic FLID model file.
    SynthFlid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw an independent utility scale per coordinate instead of one
        /// shared draw.
        #[arg(long)]
        per_coordinate_u: bool,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact log-partition ln Z by enumeration (n <= 20).
    ExactLogz {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Certified lower bound on the posterior-agreement objective.
    PaBound {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        model2: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        epochs: usize,
        /// Anchor-set search for the upper bounds; defaults to exhaustive
        /// when n <= 20.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Submodularity and oracle self-tests for a model file.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// Spot-check sample count used when n > 20.
        #[arg(long, default_value_t = 20000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            model,
            model2,
            objective,
            beta,
            solver,
            seed,
            epochs,
            order,
            assertions,
            out,
        } => solve(model, model2, objective, beta, solver, seed, epochs, order, assertions, out),
        Command::Compare { spec, out } => compare(spec, out),
        Command::SynthFlid { n, d, seed, per_coordinate_u, out } => {
            let spec = SyntheticFlidSpec { n, d, seed, per_coordinate_u };
            let model = synth_flid(&spec)?;
            save_model(&out, &ModelFile::of_flid(&model))?;
            println!("wrote synthetic FLID model (n={n}, D={d}, seed={seed}) to {}", out.display());
            Ok(())
        }
        Command::ExactLogz { model, beta } => {
            let f = load_model(&model)?;
            let z = exact_log_partition(&f, beta)?;
            println!("{z}");
            Ok(())
        }
        Command::PaBound { model, model2, beta, seed, epochs, strategy, restarts } => {
            pa_bound(model, model2, beta, seed, epochs, strategy, restarts)
        }
        Command::Check { model, samples, seed } => check(model, samples, seed),
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    model: PathBuf,
    model2: Option<PathBuf>,
    objective: ObjectiveArg,
    beta: f64,
    solver: SolverArg,
    seed: u64,
    epochs: usize,
    order: OrderFlags,
    assertions: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let objective = match (objective, &model2) {
        (ObjectiveArg::Elbo, _) => ObjectiveSpec::Elbo,
        (ObjectiveArg::PaElbo, Some(_)) => ObjectiveSpec::PaElbo { beta },
        (ObjectiveArg::PaElbo, None) => bail!("--objective pa-elbo needs --model2"),
    };
    let mut models = vec![ModelSource::File { path: model }];
    if matches!(objective, ObjectiveSpec::PaElbo { .. }) {
        models.push(ModelSource::File { path: model2.expect("checked above") });
    }
    let spec = ExperimentSpec {
        objective,
        instances: vec![InstanceSpec { name: "instance".to_string(), models }],
        fold_pairs: vec![],
        solvers: vec![SolverSpec::from(SolverKind::from(solver))],
        seed,
        epochs,
        order: order.resolve()?,
        trajectory: TrajectorySpec::PerEpoch,
        exact_oracles: true,
        assertions,
    };

    let execution = execute(&spec)?;
    if let Some(failure) = execution.failures.first() {
        bail!("{}", failure.reason);
    }
    let row = &execution.summary[0];
    println!("solver       : {}", row.solver);
    println!("objective    : {}", row.objective);
    println!("n            : {}", row.n);
    println!("final value  : {}", row.final_value);
    if let (Some(fa), Some(fb), Some(delta)) =
        (row.value_at_lower, row.value_at_upper, row.one_d_error)
    {
        println!("certificate  : f(a)={fa} f(b)={fb} delta={delta}");
    }
    if let Some(z) = row.exact_log_z {
        println!("exact ln Z   : {z}");
    }
    if let (Some(bound), Some(exact)) = (row.pa_lower_bound, row.exact_pa) {
        println!("PA bound     : {bound} (exact PA objective {exact})");
    }
    println!(
        "final x      : {}",
        row.final_x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    );
    if let Some(dir) = out {
        let artifacts = run_experiment(&spec, &dir)?;
        println!("artifacts    : {}", artifacts.summary_path.parent().unwrap().display());
    }
    Ok(())
}

fn compare(spec_path: PathBuf, out: PathBuf) -> Result<()> {
    let spec = load_spec(&spec_path)?;
    let artifacts = run_experiment(&spec, &out)?;
    println!(
        "{} runs written to {}",
        artifacts.summary.len(),
        out.display()
    );
    Ok(())
}

fn pa_bound(
    model: PathBuf,
    model2: PathBuf,
    beta: f64,
    seed: u64,
    epochs: usize,
    strategy: Option<StrategyArg>,
    restarts: usize,
) -> Result<()> {
    let f1 = load_model(&model)?;
    let f2 = load_model(&model2)?;
    let strategy = match strategy {
        Some(StrategyArg::Exhaustive) => UpperBoundStrategy::Exhaustive,
        Some(StrategyArg::LocalSearch) => UpperBoundStrategy::LocalSearch { seed, restarts },
        None if f1.ground_size() <= ENUMERATION_LIMIT => UpperBoundStrategy::Exhaustive,
        None => UpperBoundStrategy::LocalSearch { seed, restarts },
    };
    let mut cfg = SolverConfig::<f64>::seeded(seed);
    cfg.epochs = epochs;
    let report = pa_lower_bound(&f1, &f2, beta, &cfg, &strategy)?;
    println!("PA-ELBO max    : {}", report.pa_elbo_value);
    println!("ln Z upper (D') : {}", report.log_z_upper_first);
    println!("ln Z upper (D''): {}", report.log_z_upper_second);
    println!("PA lower bound : {}", report.lower_bound);
    if let Some(exact) = report.exact {
        println!("exact PA       : {exact}");
    }
    Ok(())
}

fn check(model_path: PathBuf, samples: usize, seed: u64) -> Result<()> {
    let f = load_model(&model_path)?;
    let n = f.ground_size();
    println!("model          : {} (kind {}, n={n})", model_path.display(), f.family());

    let verdict = if n <= ENUMERATION_LIMIT {
        f.check_submodular_exhaustive()?
    } else {
        f.check_submodular_sampled(samples, seed)?
    };
    match &verdict {
        SubmodularityVerdict::Holds { checks } => {
            println!("submodularity  : ok ({checks} triples checked)");
        }
        SubmodularityVerdict::Violated { element, deficit, .. } => {
            println!("submodularity  : VIOLATED at element {element} (deficit {deficit})");
        }
    }

    let mut oracle_ok = true;
    if n <= ENUMERATION_LIMIT {
        match MultilinearOracle::closed_form(f.clone()) {
            Ok(closed) => {
                let brute = MultilinearOracle::enumeration(f.clone())?;
                let mut rng = DetRng::derived(seed, 0xC0DE);
                let mut worst = 0.0f64;
                for _ in 0..20 {
                    let x = Point::new((0..n).map(|_| rng.uniform01()).collect());
                    worst = worst.max((closed.value(&x)? - brute.value(&x)?).abs());
                    for i in 0..n {
                        let g = closed.grad_coord(i, &x)?;
                        let gb = brute.grad_coord(i, &x)?;
                        worst = worst.max((g - gb).abs());
                    }
                }
                oracle_ok = worst <= 1e-9;
                println!(
                    "oracle         : closed form vs enumeration, max |diff| = {worst:e} ({})",
                    if oracle_ok { "ok" } else { "FAILED" }
                );
            }
            Err(_) => println!("oracle         : no closed form for this family, skipped"),
        }
    } else {
        println!("oracle         : n > {ENUMERATION_LIMIT}, enumeration cross-check skipped");
    }

    // the ELBO coordinate update never decreases the objective
    let mut update_ok = true;
    if n <= ENUMERATION_LIMIT {
        let oracle = MultilinearOracle::auto(f)?;
        let obj = dgmf::objectives::ElboObjective::new(oracle);
        let mut rng = DetRng::derived(seed, 0xE1B0);
        for _ in 0..10 {
            let x = Point::new((0..n).map(|_| rng.uniform01()).collect());
            for i in 0..n {
                if obj.coord_max(i, &x)?.gain < -1e-12 {
                    update_ok = false;
                }
            }
        }
        println!(
            "coord updates  : sigmoid gains non-negative ({})",
            if update_ok { "ok" } else { "FAILED" }
        );
    }

    if !verdict.holds() || !oracle_ok || !update_ok {
        bail!("self-tests failed");
    }
    Ok(())
}
