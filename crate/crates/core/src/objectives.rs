//! Mean-field objectives over the unit box.
//!
//! The evidence lower bound of a log-submodular model p(S) ∝ exp(F(S)) is
//! f(x) = m(x) + Σ_i H(x_i) with m the multilinear extension of F and H the
//! binary entropy; f(x) <= ln Z for every x. The posterior-agreement variant
//! sums two extensions weighted by an inverse temperature β. Both restrict
//! to strictly concave 1-D slices g·t + H(t) + const along any coordinate,
//! so the exact coordinate maximizer is the sigmoid σ(g) of the
//! multilinear-part partial derivative.
//!
//! All logarithms are natural; entropies and partition values are in nats.

use crate::domain::{BoxDomain, CoordMax, DrObjective, Point};
use crate::error::{Error, Result};
use crate::multilinear::MultilinearOracle;
use crate::scalar::Real;

/// Binary entropy H(t) = −[t ln t + (1−t) ln(1−t)] with the exact
/// convention 0·ln 0 = 0 (no clamping, so vertex values stay exact).
pub fn binary_entropy<T: Real>(t: T) -> Result<T> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "entropy argument {t} outside [0, 1]"
        )));
    }
    if t == T::zero() || t == T::one() {
        return Ok(T::zero());
    }
    let one = T::one();
    Ok(-(t * t.ln() + (one - t) * (one - t).ln()))
}

/// Logistic sigmoid σ(g) = 1/(1 + e^{−g}), evaluated on the numerically
/// stable branch.
pub fn sigmoid<T: Real>(g: T) -> T {
    if g >= T::zero() {
        T::one() / (T::one() + (-g).exp())
    } else {
        let e = g.exp();
        e / (T::one() + e)
    }
}

/// Softplus ln(1 + e^g); equals max_t [g·t + H(t)] over t ∈ \[0,1\].
pub fn softplus<T: Real>(g: T) -> T {
    if g > T::zero() {
        g + (-g).exp().ln_1p()
    } else {
        g.exp().ln_1p()
    }
}

fn entropy_sum<T: Real>(x: &Point<T>) -> Result<T> {
    let mut acc = T::zero();
    for i in 0..x.dim() {
        acc = acc + binary_entropy(x[i])?;
    }
    Ok(acc)
}

fn sigmoid_coord_max<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    g: T,
    i: usize,
    x: &Point<T>,
) -> Result<CoordMax<T>> {
    if !g.is_finite() {
        return Err(Error::NonFinite("coordinate gradient"));
    }
    let u = sigmoid(g);
    // reference path: two full objective evaluations
    let before = obj.value(x)?;
    let after = obj.value(&x.replace(i, u)?)?;
    Ok(CoordMax { arg: u, gain: after - before })
}

/// ELBO objective f(x) = m(x) + Σ_i H(x_i) on \[0,1\]^n.
#[derive(Debug, Clone, PartialEq)]
pub struct ElboObjective<T> {
    oracle: MultilinearOracle<T>,
    domain: BoxDomain<T>,
}

impl<T: Real> ElboObjective<T> {
    pub fn new(oracle: MultilinearOracle<T>) -> Self {
        let domain = BoxDomain::unit(oracle.dim());
        ElboObjective { oracle, domain }
    }

    pub fn oracle(&self) -> &MultilinearOracle<T> {
        &self.oracle
    }

    /// Incremental gain of moving coordinate i from x_i to u along the 1-D
    /// slice: g·(u − x_i) + H(u) − H(x_i). Must agree with the two-evaluation
    /// reference path used by `coord_max`.
    pub fn incremental_gain(&self, i: usize, x: &Point<T>, u: T) -> Result<T> {
        let g = self.oracle.grad_coord(i, x)?;
        Ok(g * (u - x[i]) + binary_entropy(u)? - binary_entropy(x[i])?)
    }
}

impl<T: Real> DrObjective<T> for ElboObjective<T> {
    fn domain(&self) -> &BoxDomain<T> {
        &self.domain
    }

    fn value(&self, x: &Point<T>) -> Result<T> {
        Ok(self.oracle.value(x)? + entropy_sum(x)?)
    }

    fn coord_max(&self, i: usize, x: &Point<T>) -> Result<CoordMax<T>> {
        let g = self.oracle.grad_coord(i, x)?;
        sigmoid_coord_max(self, g, i, x)
    }
}

/// Posterior-agreement ELBO f(x) = β m′(x) + β m″(x) + Σ_i H(x_i), with the
/// two extensions taken over models trained on two data folds and β > 0 the
/// inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct PaElboObjective<T> {
    first: MultilinearOracle<T>,
    second: MultilinearOracle<T>,
    beta: T,
    domain: BoxDomain<T>,
}

impl<T: Real> PaElboObjective<T> {
    pub fn new(first: MultilinearOracle<T>, second: MultilinearOracle<T>, beta: T) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::LengthMismatch { left: first.dim(), right: second.dim() });
        }
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature beta = {beta} must be positive and finite"
            )));
        }
        let domain = BoxDomain::unit(first.dim());
        Ok(PaElboObjective { first, second, beta, domain })
    }

    /// Both folds with the default β = 1.
    pub fn unit_temperature(first: MultilinearOracle<T>, second: MultilinearOracle<T>) -> Result<Self> {
        Self::new(first, second, T::one())
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn first(&self) -> &MultilinearOracle<T> {
        &self.first
    }

    pub fn second(&self) -> &MultilinearOracle<T> {
        &self.second
    }
}

impl<T: Real> DrObjective<T> for PaElboObjective<T> {
    fn domain(&self) -> &BoxDomain<T> {
        &self.domain
    }

    fn value(&self, x: &Point<T>) -> Result<T> {
        Ok(self.beta * self.first.value(x)? + self.beta * self.second.value(x)? + entropy_sum(x)?)
    }

    fn coord_max(&self, i: usize, x: &Point<T>) -> Result<CoordMax<T>> {
        let g = self.beta * self.first.grad_coord(i, x)?
            + self.beta * self.second.grad_coord(i, x)?;
        sigmoid_coord_max(self, g, i, x)
    }
}

/// 1-D maximization by ternary search for objectives without a closed-form
/// coordinate update. Requires the restriction t ↦ f(x with i←t) to be
/// concave on [a_i, b_i], which DR-submodularity guarantees. The returned
/// maximizer is within `tol` of an exact one, so the additive value error is
/// bounded by (1-D Lipschitz constant) × tol; callers solving all n
/// coordinates this way should report δ = n · L · tol.
pub fn coord_max_ternary<T: Real, O: DrObjective<T> + ?Sized>(
    obj: &O,
    i: usize,
    x: &Point<T>,
    tol: T,
) -> Result<CoordMax<T>> {
    if !tol.is_finite() || tol <= T::zero() {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let dom = obj.domain();
    if i >= dom.dim() {
        return Err(Error::IndexOutOfRange { index: i, n: dom.dim() });
    }
    let mut lo = dom.lower()[i];
    let mut hi = dom.upper()[i];
    let base = obj.value(x)?;
    if !base.is_finite() {
        return Err(Error::NonFinite("ternary search"));
    }
    let third = T::of(1.0 / 3.0);
    let half = T::of(0.5);
    let mut iterations = 0usize;
    while hi - lo > tol && iterations < 256 {
        iterations += 1;
        let step = (hi - lo) * third;
        let m1 = lo + step;
        let m2 = hi - step;
        let f1 = obj.value(&x.replace(i, m1)?)?;
        let f2 = obj.value(&x.replace(i, m2)?)?;
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::NonFinite("ternary search"));
        }
        if f1 < f2 {
            lo = m1;
        } else if f2 < f1 {
            hi = m2;
        } else {
            // equal probes: by concavity the maximum lies between them
            lo = m1;
            hi = m2;
        }
    }
    let u = half * (lo + hi);
    let gain = obj.value(&x.replace(i, u)?)? - base;
    Ok(CoordMax { arg: u, gain })
}
