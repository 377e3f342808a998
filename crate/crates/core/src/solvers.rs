//! Optimization algorithms for box-constrained DR-submodular maximization.
//!
//! * [`dr_double_greedy`] — one pass over the coordinates, two solution rows
//!   initialized at the box corners; each visited coordinate of both rows is
//!   set to the gain-weighted convex combination of the two 1-D maximizers.
//!   Guarantee: f(out) >= ½ f(x*) + ¼ [f(a) + f(b)] − 5δ/4.
//! * [`submodular_double_greedy`] — the winner-take-all baseline with the
//!   weaker certificate f(out) >= ⅓ [f(x*) + f(a) + f(b)] (error-free case).
//! * [`coordinate_ascent`] — fixed-point sigmoid updates from a chosen
//!   initializer; reaches local optima only.
//! * [`dg_mean_field`] — double greedy as the initializer, then coordinate
//!   ascent for T epochs; every update is non-decreasing so the initializer's
//!   certificate is inherited.
//!
//! A single run is sequential (the sweeps are order-dependent); distinct runs
//! share no mutable state and may execute concurrently.

use crate::domain::{DrObjective, Point};
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::scalar::Real;

/// Coordinate visitation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordinateOrder {
    /// 0, 1, ..., n−1 in every epoch.
    Identity,
    /// A fresh uniformly random permutation per epoch, derived from the seed
    /// and the epoch index only — two solvers sharing a seed visit
    /// coordinates identically.
    Random { seed: u64 },
    /// A fixed explicit permutation, reused in every epoch.
    Explicit(Vec<usize>),
}

impl CoordinateOrder {
    /// The permutation used in the given epoch.
    pub fn epoch_order(&self, n: usize, epoch: usize) -> Result<Vec<usize>> {
        match self {
            CoordinateOrder::Identity => Ok((0..n).collect()),
            CoordinateOrder::Random { seed } => {
                Ok(DetRng::derived(*seed, epoch as u64).permutation(n))
            }
            CoordinateOrder::Explicit(p) => {
                if p.len() != n {
                    return Err(Error::LengthMismatch { left: p.len(), right: n });
                }
                let mut seen = vec![false; n];
                for &i in p {
                    if i >= n {
                        return Err(Error::IndexOutOfRange { index: i, n });
                    }
                    if seen[i] {
                        return Err(Error::InvalidParameter(format!(
                            "explicit order repeats coordinate {i}"
                        )));
                    }
                    seen[i] = true;
                }
                Ok(p.clone())
            }
        }
    }
}

/// Granularity of the recorded value trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trajectory {
    PerCoordinate,
    PerEpoch,
}

/// Solver configuration shared by all algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub order: CoordinateOrder,
    /// Number of coordinate-ascent epochs for the multi-epoch solvers; the
    /// one-pass double-greedy sweeps ignore it.
    pub epochs: usize,
    /// Record per-step certificates of the supporting inequalities
    /// (1-D solution flips, row ordering, monotone gains) into the report.
    pub assertions: bool,
    /// Reference point x̃ enabling the intermediate-loss check
    /// f(õ^{k−1}) − f(õ^k) <= ½[Δf_x + Δf_y] + 2.5δ/n with
    /// õ^k = (x̃ ∨ x^k) ∧ y^k. Costs O(n) extra evaluations per step, so it
    /// is off unless a reference is supplied.
    pub intermediate_reference: Option<Point<T>>,
    pub trajectory: Trajectory,
    /// Multi-epoch solvers stop early once no coordinate moves further than
    /// this; the sigmoid update is an exact fixed point at convergence.
    pub early_stop: T,
    /// Slack added to every recorded inequality check.
    pub assertion_slack: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            order: CoordinateOrder::Identity,
            epochs: 1,
            assertions: false,
            intermediate_reference: None,
            trajectory: Trajectory::PerCoordinate,
            early_stop: T::of(1e-10),
            assertion_slack: T::of(1e-9),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_order(order: CoordinateOrder) -> Self {
        SolverConfig { order, ..Self::default() }
    }

    pub fn seeded(seed: u64) -> Self {
        Self::with_order(CoordinateOrder::Random { seed })
    }
}

/// Approximation guarantee attached to a double-greedy run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuaranteeKind {
    /// f(out) >= ½ f(x*) + ¼ [f(a) + f(b)] − 5δ/4.
    Half,
    /// f(out) >= ⅓ [f(x*) + f(a) + f(b)] (error-free 1-D solutions).
    Third,
}

/// The data needed to certify the guarantee once an estimate of f(x*) is
/// available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate<T> {
    pub kind: GuaranteeKind,
    /// f(a), the objective at the lower box corner.
    pub value_at_lower: T,
    /// f(b), the objective at the upper box corner.
    pub value_at_upper: T,
    /// Additive 1-D error budget δ reported by the objective.
    pub one_d_error: T,
}

impl<T: Real> Certificate<T> {
    /// The lower bound on f(output) implied by a value f(x*) of the optimum
    /// (or of any feasible reference point, which certifies soundly since
    /// f(x*) only appears with a positive coefficient).
    pub fn implied_bound(&self, opt_value: T) -> T {
        match self.kind {
            GuaranteeKind::Half => {
                T::of(0.5) * opt_value
                    + T::of(0.25) * (self.value_at_lower + self.value_at_upper)
                    - T::of(1.25) * self.one_d_error
            }
            GuaranteeKind::Third => {
                (opt_value + self.value_at_lower + self.value_at_upper) / T::of(3.0)
            }
        }
    }
}

/// One recorded inequality check: `passed` is lhs >= rhs for `>=`-style
/// checks and lhs <= rhs for `<=`-style checks, as named.
#[derive(Debug, Clone, PartialEq)]
pub struct AssertionRecord<T> {
    pub step: usize,
    pub coordinate: usize,
    pub check: &'static str,
    pub lhs: T,
    pub rhs: T,
    pub passed: bool,
}

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport<T> {
    pub final_x: Point<T>,
    pub final_value: T,
    /// (step label, objective value at the recorded point). Values are the
    /// objective evaluated exactly at the recorded states.
    pub trajectory: Vec<(String, T)>,
    pub certificate: Option<Certificate<T>>,
    pub assertions: Vec<AssertionRecord<T>>,
}

impl<T: Real> SolverReport<T> {
    pub fn assertions_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failed_assertions(&self) -> impl Iterator<Item = &AssertionRecord<T>> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}

/// Initial point of a coordinate-ascent run.
#[derive(Debug, Clone, PartialEq)]
pub enum Init<T> {
    /// The lower box corner a (the zero vector on the unit box).
    Lower,
    /// The upper box corner b (the all-ones vector on the unit box).
    Upper,
    /// Coordinate-wise uniform draw from [a_i, b_i].
    Uniform { seed: u64 },
    /// An explicit feasible point.
    Point(Point<T>),
}

impl<T: Real> Init<T> {
    fn resolve<O: DrObjective<T> + ?Sized>(&self, obj: &O) -> Result<Point<T>> {
        let dom = obj.domain();
        match self {
            Init::Lower => Ok(dom.lower().clone()),
            Init::Upper => Ok(dom.upper().clone()),
            Init::Uniform { seed } => {
                let mut rng = DetRng::derived(*seed, 0x1417);
                let coords = (0..dom.dim())
                    .map(|i| {
                        let a = dom.lower()[i];
                        let b = dom.upper()[i];
                        a + (b - a) * T::of(rng.uniform01())
                    })
                    .collect();
                Ok(Point::new(coords))
            }
            Init::Point(p) => {
                dom.contains(p)?;
                Ok(p.clone())
            }
        }
    }
}

/// Which double-greedy initializer a mean-field run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgVariant {
    /// `dr_double_greedy`, ½ guarantee.
    Half,
    /// `submodular_double_greedy`, ⅓ guarantee.
    Third,
}

fn ensure_finite<T: Real>(v: T, what: &'static str) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

struct DoubleGreedyState<'a, T, O: ?Sized> {
    obj: &'a O,
    cfg: &'a SolverConfig<T>,
    x: Point<T>,
    y: Point<T>,
    fx: T,
    fy: T,
    intermediate: Option<(Point<T>, T)>,
    assertions: Vec<AssertionRecord<T>>,
    trajectory: Vec<(String, T)>,
}

impl<'a, T: Real, O: DrObjective<T> + ?Sized> DoubleGreedyState<'a, T, O> {
    fn start(obj: &'a O, cfg: &'a SolverConfig<T>) -> Result<Self> {
        let dom = obj.domain();
        let x = dom.lower().clone();
        let y = dom.upper().clone();
        let fx = ensure_finite(obj.value(&x)?, "objective at lower corner")?;
        let fy = ensure_finite(obj.value(&y)?, "objective at upper corner")?;
        let intermediate = match (&cfg.intermediate_reference, cfg.assertions) {
            (Some(reference), true) => {
                dom.contains(reference)?;
                let o = reference.join(&x)?.meet(&y)?;
                let fo = obj.value(&o)?;
                Some((o, fo))
            }
            _ => None,
        };
        Ok(DoubleGreedyState {
            obj,
            cfg,
            x,
            y,
            fx,
            fy,
            intermediate,
            assertions: Vec::new(),
            trajectory: vec![("init".to_string(), fx)],
        })
    }

    /// The shared per-coordinate bookkeeping: both rows take the value `u`
    /// at coordinate i; supporting inequalities are recorded when enabled.
    fn apply(
        &mut self,
        step: usize,
        i: usize,
        u: T,
        u_a: T,
        u_b: T,
        delta_per_coord: T,
    ) -> Result<()> {
        let slack = self.cfg.assertion_slack;
        if self.cfg.assertions {
            // flipped 1-D solutions still do not decrease either row
            let flip_x = self.obj.value(&self.x.replace(i, u_b)?)? - self.fx;
            let flip_y = self.obj.value(&self.y.replace(i, u_a)?)? - self.fy;
            let bound = -delta_per_coord - slack;
            self.assertions.push(AssertionRecord {
                step,
                coordinate: i,
                check: "flip_gain_x",
                lhs: flip_x,
                rhs: bound,
                passed: flip_x >= bound,
            });
            self.assertions.push(AssertionRecord {
                step,
                coordinate: i,
                check: "flip_gain_y",
                lhs: flip_y,
                rhs: bound,
                passed: flip_y >= bound,
            });
        }

        let dom = self.obj.domain();
        let u = u.max(dom.lower()[i]).min(dom.upper()[i]);
        self.x = self.x.replace(i, u)?;
        self.y = self.y.replace(i, u)?;
        let fx_new = ensure_finite(self.obj.value(&self.x)?, "objective during sweep")?;
        let fy_new = ensure_finite(self.obj.value(&self.y)?, "objective during sweep")?;

        if self.cfg.assertions {
            let ordered = self.x.le(&self.y);
            self.assertions.push(AssertionRecord {
                step,
                coordinate: i,
                check: "rows_ordered",
                lhs: if ordered { T::one() } else { T::zero() },
                rhs: T::one(),
                passed: ordered,
            });
            if let Some((_, fo_prev)) = self.intermediate.take() {
                let reference = self
                    .cfg
                    .intermediate_reference
                    .as_ref()
                    .expect("intermediate tracking requires a reference point");
                let o = reference.join(&self.x)?.meet(&self.y)?;
                let fo = self.obj.value(&o)?;
                let lhs = fo_prev - fo;
                let rhs = T::of(0.5) * (fx_new - self.fx + fy_new - self.fy)
                    + T::of(2.5) * delta_per_coord
                    + slack;
                self.assertions.push(AssertionRecord {
                    step,
                    coordinate: i,
                    check: "intermediate_loss",
                    lhs,
                    rhs,
                    passed: lhs <= rhs,
                });
                self.intermediate = Some((o, fo));
            }
        }

        self.fx = fx_new;
        self.fy = fy_new;
        if self.cfg.trajectory == Trajectory::PerCoordinate {
            self.trajectory.push((format!("step{step}"), self.fx));
        }
        Ok(())
    }

    fn finish(mut self, kind: GuaranteeKind, fa: T, fb: T) -> SolverReport<T> {
        debug_assert_eq!(self.x, self.y, "both rows agree after a full sweep");
        if self.cfg.trajectory == Trajectory::PerEpoch {
            self.trajectory.push(("epoch1".to_string(), self.fx));
        }
        SolverReport {
            final_x: self.x,
            final_value: self.fx,
            trajectory: self.trajectory,
            certificate: Some(Certificate {
                kind,
                value_at_lower: fa,
                value_at_upper: fb,
                one_d_error: self.obj.one_d_error(),
            }),
            assertions: self.assertions,
        }
    }
}

/// One-pass double greedy for DR-submodular objectives with the optimal ½
/// approximation ratio. Per coordinate, both 1-D subproblems are solved and
/// both rows move to the convex combination of the solutions weighted by
/// their clamped gains δ_a, δ_b; if both gains vanish the x-row solution is
/// used.
pub fn dr_double_greedy<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    cfg: &SolverConfig<T>,
) -> Result<SolverReport<T>> {
    let n = obj.dim();
    let order = cfg.order.epoch_order(n, 0)?;
    let mut state = DoubleGreedyState::start(obj, cfg)?;
    let (fa, fb) = (state.fx, state.fy);
    let delta_per_coord = obj.one_d_error() / T::of(n as f64);

    for (step, &i) in order.iter().enumerate() {
        let ca = obj.coord_max(i, &state.x)?;
        let cb = obj.coord_max(i, &state.y)?;
        ensure_finite(ca.arg, "1-D maximizer")?;
        ensure_finite(cb.arg, "1-D maximizer")?;
        let da = ca.gain.max(T::zero());
        let db = cb.gain.max(T::zero());
        let u = if da + db > T::zero() {
            (da * ca.arg + db * cb.arg) / (da + db)
        } else {
            ca.arg
        };
        state.apply(step + 1, i, u, ca.arg, cb.arg, delta_per_coord)?;
    }
    Ok(state.finish(GuaranteeKind::Half, fa, fb))
}

/// One-pass double greedy for general continuous submodular objectives:
/// the coordinate moves to whichever 1-D maximizer gained more
/// (winner-take-all), giving the ⅓ guarantee.
pub fn submodular_double_greedy<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    cfg: &SolverConfig<T>,
) -> Result<SolverReport<T>> {
    let n = obj.dim();
    let order = cfg.order.epoch_order(n, 0)?;
    let mut state = DoubleGreedyState::start(obj, cfg)?;
    let (fa, fb) = (state.fx, state.fy);
    let delta_per_coord = obj.one_d_error() / T::of(n as f64);

    for (step, &i) in order.iter().enumerate() {
        let ca = obj.coord_max(i, &state.x)?;
        let cb = obj.coord_max(i, &state.y)?;
        ensure_finite(ca.arg, "1-D maximizer")?;
        ensure_finite(cb.arg, "1-D maximizer")?;
        let u = if ca.gain >= cb.gain { ca.arg } else { cb.arg };
        state.apply(step + 1, i, u, ca.arg, cb.arg, delta_per_coord)?;
    }
    Ok(state.finish(GuaranteeKind::Third, fa, fb))
}

/// Trajectory and assertion records accumulated across solver phases.
struct RunLog<T> {
    trajectory: Vec<(String, T)>,
    assertions: Vec<AssertionRecord<T>>,
    step: usize,
}

fn ascent_epochs<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    cfg: &SolverConfig<T>,
    mut x: Point<T>,
    mut fx: T,
    first_epoch: usize,
    log: &mut RunLog<T>,
) -> Result<(Point<T>, T)> {
    let n = obj.dim();
    for epoch in 0..cfg.epochs {
        let order = cfg.order.epoch_order(n, first_epoch + epoch)?;
        let mut max_change = T::zero();
        for &i in &order {
            log.step += 1;
            let cm = obj.coord_max(i, &x)?;
            ensure_finite(cm.arg, "1-D maximizer")?;
            if cfg.assertions {
                log.assertions.push(AssertionRecord {
                    step: log.step,
                    coordinate: i,
                    check: "ascent_gain",
                    lhs: cm.gain,
                    rhs: -cfg.assertion_slack,
                    passed: cm.gain >= -cfg.assertion_slack,
                });
            }
            let change = (cm.arg - x[i]).abs();
            if change > max_change {
                max_change = change;
            }
            x = x.replace(i, cm.arg)?;
            fx = ensure_finite(obj.value(&x)?, "objective during ascent")?;
            if cfg.trajectory == Trajectory::PerCoordinate {
                log.trajectory.push((format!("step{}", log.step), fx));
            }
        }
        if cfg.trajectory == Trajectory::PerEpoch {
            log.trajectory.push((format!("epoch{}", first_epoch + epoch + 1), fx));
        }
        if max_change < cfg.early_stop {
            break;
        }
    }
    Ok((x, fx))
}

/// Coordinate-wise sigmoid fixed-point iteration from the given initializer,
/// for `cfg.epochs` epochs with a fresh seeded order per epoch. Every update
/// maximizes its 1-D restriction exactly, so the objective never decreases;
/// local optima are the only guarantee.
pub fn coordinate_ascent<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    init: &Init<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverReport<T>> {
    if cfg.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be >= 1".into()));
    }
    let x = init.resolve(obj)?;
    let fx = ensure_finite(obj.value(&x)?, "objective at initializer")?;
    let mut log =
        RunLog { trajectory: vec![("init".to_string(), fx)], assertions: Vec::new(), step: 0 };
    let (x, fx) = ascent_epochs(obj, cfg, x, fx, 0, &mut log)?;
    Ok(SolverReport {
        final_x: x,
        final_value: fx,
        trajectory: log.trajectory,
        certificate: None,
        assertions: log.assertions,
    })
}

/// Double greedy as the initializer, then `cfg.epochs` coordinate-ascent
/// epochs from its output. Ascent steps never decrease the objective, so the
/// initializer's guarantee certificate carries over. Ascent epochs use the
/// epoch indices after the initializer pass (epoch 0), keeping the shared
/// random orders aligned across solvers run with the same seed.
pub fn dg_mean_field<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    variant: DgVariant,
    cfg: &SolverConfig<T>,
) -> Result<SolverReport<T>> {
    if cfg.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be >= 1".into()));
    }
    let initializer = match variant {
        DgVariant::Half => dr_double_greedy(obj, cfg)?,
        DgVariant::Third => submodular_double_greedy(obj, cfg)?,
    };
    let mut log = RunLog {
        trajectory: initializer.trajectory,
        assertions: initializer.assertions,
        step: obj.dim(),
    };
    let (x, fx) =
        ascent_epochs(obj, cfg, initializer.final_x, initializer.final_value, 1, &mut log)?;
    debug_assert!(fx >= initializer.final_value - cfg.assertion_slack);
    Ok(SolverReport {
        final_x: x,
        final_value: fx,
        trajectory: log.trajectory,
        certificate: initializer.certificate,
        assertions: log.assertions,
    })
}
