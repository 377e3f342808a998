//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime. Run with
//!
//! ```text
//! cargo test -p dgmf-cli --test acceptance -- --nocapture
//! ```

use std::fs;
use std::time::{Duration, Instant};

use dgmf::bounds::{
    exact_log_partition, log_partition_upper, pa_lower_bound, UpperBoundStrategy,
};
use dgmf::domain::{DrObjective, Point};
use dgmf::multilinear::{sample_estimate, MultilinearOracle};
use dgmf::objectives::ElboObjective;
use dgmf::rng::DetRng;
use dgmf::set_functions::{
    CutGraph, FlidModel, GibbsPolynomial, SetCoverInstance, SetFunction,
};
use dgmf::solvers::{
    coordinate_ascent, dg_mean_field, dr_double_greedy, submodular_double_greedy, DgVariant,
    Init, SolverConfig,
};
use dgmf_cli::experiment::{
    load_spec, run_experiment, ExperimentSpec, InstanceSpec, ModelSource, ObjectiveSpec,
    OrderSpec, SolverKind, SolverSpec, TrajectorySpec,
};
use dgmf_cli::model_io::{synth_flid, SyntheticFlidSpec};

const FAMILIES: [&str; 5] = ["flid", "cut-directed", "cut-undirected", "gibbs", "set-cover"];

/// Seeded random instance of the named family, n in 2..=max_n
/// (FLID latent dimension capped at 4).
fn random_instance(rng: &mut DetRng, family: &str, max_n: usize) -> SetFunction<f64> {
    let n = 2 + rng.below(max_n - 1);
    match family {
        "flid" => {
            let d = 1 + rng.below(4);
            let w = (0..n)
                .map(|_| (0..d).map(|_| rng.uniform01()).collect())
                .collect();
            let u = (0..n).map(|_| 0.1 * d as f64 * rng.uniform01()).collect();
            SetFunction::Flid(FlidModel::new(w, u).unwrap())
        }
        "cut-directed" | "cut-undirected" => {
            let directed = family == "cut-directed";
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && (directed || i < j) && rng.uniform01() < 0.4 {
                        edges.push((i, j, rng.uniform01()));
                    }
                }
            }
            if edges.is_empty() {
                edges.push((0, 1, 0.5 + rng.uniform01()));
            }
            SetFunction::Cut(CutGraph::new(n, directed, edges).unwrap())
        }
        "gibbs" => {
            let mut terms = Vec::new();
            for i in 0..n {
                terms.push((vec![i], 2.0 * rng.uniform01() - 1.0));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.uniform01() < 0.5 {
                        terms.push((vec![i, j], -rng.uniform01()));
                    }
                }
            }
            if n >= 3 && rng.uniform01() < 0.5 {
                terms.push((vec![0, 1, 2], -rng.uniform01()));
            }
            SetFunction::Gibbs(GibbsPolynomial::new(n, terms).unwrap())
        }
        "set-cover" => {
            let concepts = (0..n)
                .map(|_| {
                    let mut items: Vec<usize> =
                        (0..n).filter(|_| rng.uniform01() < 0.4).collect();
                    if items.is_empty() {
                        items.push(rng.below(n));
                    }
                    (rng.uniform01(), items)
                })
                .collect();
            SetFunction::SetCover(SetCoverInstance::new(n, concepts).unwrap())
        }
        other => panic!("unknown family {other}"),
    }
}

fn random_point(rng: &mut DetRng, n: usize) -> Point<f64> {
    Point::new((0..n).map(|_| rng.uniform01()).collect())
}

fn finish(criterion: &str, what: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("ACCEPTANCE {criterion} PASS: {what} ({elapsed:.2?}, budget {budget:.0?})");
    assert!(
        elapsed <= budget,
        "{criterion} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}"
    );
}

#[test]
fn c01_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = DetRng::new(0xACC1);
    let mut worst = 0.0f64;
    for family in FAMILIES {
        for _ in 0..50 {
            let f = random_instance(&mut rng, family, 12);
            let n = f.ground_size();
            let closed = MultilinearOracle::closed_form(f.clone()).unwrap();
            let brute = MultilinearOracle::enumeration(f).unwrap();
            for _ in 0..20 {
                let x = random_point(&mut rng, n);
                let diff = (closed.value(&x).unwrap() - brute.value(&x).unwrap()).abs();
                assert!(diff <= 1e-9, "{family}: closed form off by {diff}");
                worst = worst.max(diff);
            }
        }
    }
    finish(
        "1",
        &format!("closed-form m(x) matches 2^n enumeration on 250 instances, max |diff| {worst:.2e}"),
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn c02_gradient_identity() {
    let started = Instant::now();
    let mut rng = DetRng::new(0xACC2);
    let mut worst = 0.0f64;
    for family in FAMILIES {
        for _ in 0..10 {
            let f = random_instance(&mut rng, family, 10);
            let n = f.ground_size();
            let closed = MultilinearOracle::closed_form(f.clone()).unwrap();
            let brute = MultilinearOracle::enumeration(f).unwrap();
            for _ in 0..4 {
                let x = random_point(&mut rng, n);
                for i in 0..n {
                    // the identity computed through two independent routes
                    let g_closed = closed.grad_coord(i, &x).unwrap();
                    let g_brute = brute.grad_coord(i, &x).unwrap();
                    let diff = (g_closed - g_brute).abs();
                    assert!(diff <= 1e-9);
                    worst = worst.max(diff);
                    if family == "flid" {
                        let refined = closed.flid_grad_refined(i, &x).unwrap();
                        let diff = (refined - g_brute).abs();
                        assert!(diff <= 1e-9, "refined FLID gradient off by {diff}");
                        worst = worst.max(diff);
                    }
                }
            }
        }
    }
    finish(
        "2",
        &format!("gradient identity and refined FLID gradient agree, max |diff| {worst:.2e}"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn c03_half_guarantee_against_grid_optimum() {
    let started = Instant::now();
    let mut rng = DetRng::new(0xACC3);
    for trial in 0..100usize {
        let family = FAMILIES[trial % FAMILIES.len()];
        let f = {
            // fixed n = 3: regenerate until the generator lands on it
            loop {
                let f = random_instance(&mut rng, family, 3);
                if f.ground_size() == 3 {
                    break f;
                }
            }
        };
        let obj = ElboObjective::new(MultilinearOracle::closed_form(f).unwrap());

        // best point on the 0.02-step grid (under-estimates the optimum, so
        // the check is sound)
        let mut best = f64::NEG_INFINITY;
        for k0 in 0..=50 {
            for k1 in 0..=50 {
                for k2 in 0..=50 {
                    let x = Point::new(vec![
                        k0 as f64 / 50.0,
                        k1 as f64 / 50.0,
                        k2 as f64 / 50.0,
                    ]);
                    let v = obj.value(&x).unwrap();
                    if v > best {
                        best = v;
                    }
                }
            }
        }

        let cfg = SolverConfig::seeded(trial as u64);
        let report = dr_double_greedy(&obj, &cfg).unwrap();
        let cert = report.certificate.unwrap();
        let bound = 0.5 * best + 0.25 * (cert.value_at_lower + cert.value_at_upper);
        assert!(
            report.final_value >= bound - 1e-6,
            "{family}: output {} below guarantee {bound}",
            report.final_value
        );
    }
    finish(
        "3",
        "f(out) >= f(grid)/2 + [f(0)+f(1)]/4 - 1e-6 on 100 random n=3 instances",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn c04_worked_trace_single_edge() {
    let started = Instant::now();
    let f = SetFunction::Cut(CutGraph::new(2, true, vec![(0, 1, 1.0)]).unwrap());
    let obj = ElboObjective::new(MultilinearOracle::closed_form(f.clone()).unwrap());
    let report = dr_double_greedy(&obj, &SolverConfig::<f64>::default()).unwrap();
    assert!((report.final_x[0] - 0.6513).abs() <= 1e-3);
    assert!((report.final_x[1] - 0.3427).abs() <= 1e-3);
    assert!((report.final_value - 1.7176).abs() <= 1e-3);
    let ln_z = exact_log_partition(&f, 1.0).unwrap();
    assert!((ln_z - (3.0 + std::f64::consts::E).ln()).abs() <= 1e-6);
    assert!(report.final_value <= ln_z);
    finish(
        "4",
        &format!(
            "DR-DG output ({:.4}, {:.4}) value {:.4}, exact ln Z {:.4}",
            report.final_x[0], report.final_x[1], report.final_value, ln_z
        ),
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn c05_poor_local_optimum_regression() {
    let started = Instant::now();
    // 4-node directed cut with c = 20, b = 5
    let f = SetFunction::Cut(
        CutGraph::new(
            4,
            true,
            vec![(0, 1, 20.0), (1, 2, 20.0), (2, 3, 20.0), (2, 1, 100.0)],
        )
        .unwrap(),
    );
    let obj = ElboObjective::new(MultilinearOracle::closed_form(f).unwrap());

    let mut cfg = SolverConfig::seeded(0);
    cfg.epochs = 100;
    let stuck = coordinate_ascent(
        &obj,
        &Init::Point(Point::new(vec![0.5, 1.0, 0.0, 0.5])),
        &cfg,
    )
    .unwrap();
    assert!(
        stuck.final_value <= 23.0,
        "coordinate ascent escaped: {}",
        stuck.final_value
    );

    let escaped = dr_double_greedy(&obj, &cfg).unwrap();
    assert!(
        escaped.final_value >= 70.0,
        "DR-DG fell short of the guarantee: {}",
        escaped.final_value
    );
    finish(
        "5",
        &format!(
            "coordinate ascent stuck at {:.3} <= 23, DR-DG reaches {:.3} >= 70",
            stuck.final_value, escaped.final_value
        ),
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn c06_sandwich_and_pa_bounds() {
    let started = Instant::now();
    let mut rng = DetRng::new(0xACC6);

    for trial in 0..100usize {
        let family = FAMILIES[trial % FAMILIES.len()];
        let f = random_instance(&mut rng, family, 12);
        let ln_z = exact_log_partition(&f, 1.0).unwrap();
        let (upper, _) = log_partition_upper(&f, 1.0, &UpperBoundStrategy::Exhaustive).unwrap();
        assert!(ln_z <= upper + 1e-9, "ln Z {ln_z} above its upper bound {upper}");

        let obj = ElboObjective::new(MultilinearOracle::closed_form(f).unwrap());
        let mut cfg = SolverConfig::seeded(trial as u64);
        cfg.epochs = 4;
        let solved = dg_mean_field(&obj, DgVariant::Half, &cfg).unwrap();
        assert!(
            solved.final_value <= ln_z + 1e-9,
            "ELBO {} above ln Z {ln_z}",
            solved.final_value
        );
    }

    for trial in 0..100usize {
        let family1 = FAMILIES[trial % FAMILIES.len()];
        let family2 = FAMILIES[(trial + 2) % FAMILIES.len()];
        let f1 = random_instance(&mut rng, family1, 12);
        let n = f1.ground_size();
        let f2 = loop {
            let f = random_instance(&mut rng, family2, 12);
            if f.ground_size() == n {
                break f;
            }
        };
        let mut cfg = SolverConfig::seeded(trial as u64);
        cfg.epochs = 4;
        let report =
            pa_lower_bound(&f1, &f2, 1.0, &cfg, &UpperBoundStrategy::Exhaustive).unwrap();
        let exact = report.exact.unwrap();
        assert!(
            report.lower_bound <= exact + 1e-9,
            "PA bound {} above exact {exact}",
            report.lower_bound
        );
    }
    finish(
        "6",
        "ELBO <= exact ln Z <= supergradient bound and PA bound <= exact PA on 100+100 instances",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn c07_per_step_inequalities_hold() {
    let started = Instant::now();
    let mut rng = DetRng::new(0xACC7);
    for trial in 0..50usize {
        let family = FAMILIES[trial % FAMILIES.len()];
        let f = random_instance(&mut rng, family, 10);
        let n = f.ground_size();
        let obj = ElboObjective::new(MultilinearOracle::closed_form(f).unwrap());
        let mut cfg = SolverConfig::seeded(trial as u64);
        cfg.assertions = true;
        cfg.intermediate_reference = Some(random_point(&mut rng, n));
        let report = dr_double_greedy(&obj, &cfg).unwrap();
        assert!(
            report.assertions_passed(),
            "step checks failed on {family}: {:?}",
            report.failed_assertions().collect::<Vec<_>>()
        );
        for check in ["flip_gain_x", "flip_gain_y", "intermediate_loss", "rows_ordered"] {
            assert_eq!(
                report.assertions.iter().filter(|a| a.check == check).count(),
                n,
                "{check} recorded once per coordinate"
            );
        }
    }
    finish(
        "7",
        "1-D flip and intermediate-loss checks hold at every step of 50 assertion-mode runs",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn c08_statistical_ordering_on_synthetic_flid() {
    let started = Instant::now();
    let mut sum_half = 0.0;
    let mut sum_third = 0.0;
    for trial in 0..50u64 {
        let d = if trial % 2 == 0 { 7 } else { 11 };
        let model = synth_flid(&SyntheticFlidSpec {
            n: 10,
            d,
            seed: trial,
            per_coordinate_u: false,
        })
        .unwrap();
        let obj = ElboObjective::new(
            MultilinearOracle::closed_form(SetFunction::Flid(model)).unwrap(),
        );
        // one shared random order per instance, as in a comparison run
        let mut cfg = SolverConfig::seeded(trial);
        cfg.epochs = 6;
        let one_pass_half = dr_double_greedy(&obj, &cfg).unwrap();
        let one_pass_third = submodular_double_greedy(&obj, &cfg).unwrap();
        let multi_half = dg_mean_field(&obj, DgVariant::Half, &cfg).unwrap();
        let multi_third = dg_mean_field(&obj, DgVariant::Third, &cfg).unwrap();
        sum_half += one_pass_half.final_value;
        sum_third += one_pass_third.final_value;
        assert!(
            multi_half.final_value >= one_pass_half.final_value - 1e-12,
            "epochs decreased the 1/2-variant value on seed {trial}"
        );
        assert!(
            multi_third.final_value >= one_pass_third.final_value - 1e-12,
            "epochs decreased the 1/3-variant value on seed {trial}"
        );
    }
    let mean_half = sum_half / 50.0;
    let mean_third = sum_third / 50.0;
    assert!(
        mean_half >= mean_third,
        "mean one-pass values out of order: {mean_half} < {mean_third}"
    );
    finish(
        "8",
        &format!(
            "mean one-pass value {mean_half:.4} (1/2-guarantee) >= {mean_third:.4} (1/3-guarantee); \
             6-epoch refinement never fell below its one-pass value"
        ),
        started,
        Duration::from_secs(300),
    );
}

#[test]
fn c09_sampling_concentration() {
    let started = Instant::now();
    let f = SetFunction::Cut(CutGraph::new(2, true, vec![(0, 1, 1.0)]).unwrap());
    let x = Point::new(vec![0.5, 0.5]);
    let (fixed, stderr): (f64, f64) = sample_estimate(&f, &x, 200_000, 0).unwrap();
    assert!(
        (fixed - 0.25).abs() <= 0.01,
        "fixed-seed estimate {fixed} strays from 0.25"
    );
    assert!(stderr > 0.0 && stderr < 0.01);
    let misses = (0u64..20)
        .filter(|&seed| {
            let (est, _): (f64, f64) = sample_estimate(&f, &x, 200_000, seed).unwrap();
            (est - 0.25).abs() > 0.01
        })
        .count();
    assert!(misses <= 1, "{misses} of 20 seeds exceeded the 0.01 band");
    finish(
        "9",
        &format!("fixed-seed estimate {fixed:.5}; {misses}/20 seeds outside the 0.01 band"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn c10_manifest_reruns_reproduce_csvs() {
    let started = Instant::now();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();

    let synth = |seed: u64| {
        ModelSource::SynthFlid(SyntheticFlidSpec { n: 9, d: 4, seed, per_coordinate_u: false })
    };
    let elbo_spec = ExperimentSpec {
        objective: ObjectiveSpec::Elbo,
        instances: (0..3)
            .map(|k| InstanceSpec { name: format!("synth-{k}"), models: vec![synth(k)] })
            .collect(),
        fold_pairs: vec![],
        solvers: vec![
            SolverKind::DrDoubleGreedy.into(),
            SolverKind::SubmodularDoubleGreedy.into(),
            SolverKind::CoordinateAscentZeros.into(),
            SolverKind::CoordinateAscentRandom.into(),
            SolverKind::DgMeanFieldHalf.into(),
        ],
        seed: 2024,
        epochs: 6,
        order: OrderSpec::Random,
        trajectory: TrajectorySpec::PerCoordinate,
        exact_oracles: true,
        assertions: false,
    };
    let pa_spec = ExperimentSpec {
        objective: ObjectiveSpec::PaElbo { beta: 1.0 },
        instances: (0..2)
            .map(|k| InstanceSpec {
                name: format!("pair-{k}"),
                models: vec![synth(10 + k), synth(20 + k)],
            })
            .collect(),
        fold_pairs: vec![synth(30), synth(31), synth(32)],
        solvers: vec![SolverSpec::from(SolverKind::DgMeanFieldHalf)],
        seed: 7,
        epochs: 4,
        order: OrderSpec::Random,
        trajectory: TrajectorySpec::PerEpoch,
        exact_oracles: true,
        assertions: false,
    };

    for (label, spec) in [("elbo", elbo_spec), ("pa", pa_spec)] {
        let a = run_experiment(&spec, &dir_a.path().join(label)).unwrap();
        let manifest = load_spec(&a.manifest_path).unwrap();
        let b = run_experiment(&manifest, &dir_b.path().join(label)).unwrap();
        assert_eq!(
            fs::read(&a.summary_path).unwrap(),
            fs::read(&b.summary_path).unwrap(),
            "{label}: summary.csv must be bit-identical"
        );
        assert_eq!(
            fs::read(&a.trajectory_path).unwrap(),
            fs::read(&b.trajectory_path).unwrap(),
            "{label}: trajectories.csv must be bit-identical"
        );
    }
    finish(
        "10",
        "manifest reruns reproduce summary.csv and trajectories.csv bit-for-bit",
        started,
        Duration::from_secs(60),
    );
}
