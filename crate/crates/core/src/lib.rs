//! Box-constrained continuous DR-submodular maximization and provable
//! mean-field inference for probabilistic log-submodular models.
//!
//! A log-submodular point process p(S) ∝ exp(F(S)) has an intractable
//! normalizer ln Z. Mean-field inference approximates p with a fully
//! factorized surrogate q(S|x) and maximizes the evidence lower bound
//! f(x) = m(x) + Σ_i H(x_i) over the unit box, where m is the multilinear
//! extension of F. That objective is continuous DR-submodular, so the
//! one-pass double-greedy sweep in [`solvers::dr_double_greedy`] reaches a
//! ½-approximation of the best factorized bound; [`solvers::dg_mean_field`]
//! refines its output with coordinate ascent without losing the guarantee.
//!
//! The pieces:
//!
//! * [`domain`] — points, boxes, subsets and the [`domain::DrObjective`]
//!   contract every solver consumes (third-party solvers plug in against it).
//! * [`set_functions`] — FLID, graph cuts, finite-order Gibbs polynomials,
//!   set cover, explicit tables, modular and concave-over-modular models,
//!   with on-demand submodularity certification.
//! * [`multilinear`] — closed-form, enumeration and sampling oracles for
//!   m(x) and its gradient.
//! * [`objectives`] — the ELBO and posterior-agreement ELBO with their exact
//!   sigmoid coordinate maximizers.
//! * [`solvers`] — DR-DoubleGreedy, the ⅓-guarantee double greedy,
//!   coordinate ascent and the multi-epoch mean-field composition.
//! * [`bounds`] — exact log-partitions at desk scale, bar-supergradient
//!   upper bounds and certified posterior-agreement lower bounds.
//!
//! Everything numeric is generic over the [`scalar::Real`] scalar
//! (f32 or f64); the `*64` aliases below fix the double-precision
//! instantiation used by the experiment CLI.

pub mod bounds;
pub mod domain;
pub mod error;
pub mod multilinear;
pub mod objectives;
pub mod rng;
pub mod scalar;
pub mod set_functions;
pub mod solvers;

pub use domain::{lattice_ops, BoxDomain, CoordMax, DrObjective, GroundSet, Point, Subset};
pub use error::{Error, Result};
pub use scalar::Real;

pub type Point64 = domain::Point<f64>;
pub type BoxDomain64 = domain::BoxDomain<f64>;
pub type SetFunction64 = set_functions::SetFunction<f64>;
pub type FlidModel64 = set_functions::FlidModel<f64>;
pub type MultilinearOracle64 = multilinear::MultilinearOracle<f64>;
pub type ElboObjective64 = objectives::ElboObjective<f64>;
pub type PaElboObjective64 = objectives::PaElboObjective<f64>;
pub type SolverConfig64 = solvers::SolverConfig<f64>;
pub type SolverReport64 = solvers::SolverReport<f64>;
pub type PartitionReport64 = bounds::PartitionReport<f64>;
pub type PaBound64 = bounds::PaBound<f64>;
