//! Ground-set indexing, box domains, dense points and subsets, and the
//! coordinate-maximization contract shared by all solvers.
//!
//! Indices are 0-based everywhere. Points are dense fixed-length vectors;
//! the problem sizes of interest stay below a few thousand coordinates.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A finite ground set `{0, ..., n-1}`, n >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("ground set must be non-empty".into()));
        }
        Ok(GroundSet { n })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        }
    }
}

/// A dense point x in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Point { coords }
    }

    pub fn constant(n: usize, v: T) -> Self {
        Point { coords: vec![v; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|v| v.is_finite())
    }

    /// x with the i-th entry set to k; every other coordinate is
    /// bit-identical to the input.
    pub fn replace(&self, i: usize, k: T) -> Result<Self> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, n: self.dim() });
        }
        let mut coords = self.coords.clone();
        coords[i] = k;
        Ok(Point { coords })
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::LengthMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// Coordinate-wise maximum x ∨ y.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        })
    }

    /// Coordinate-wise minimum x ∧ y.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        })
    }

    /// Coordinate-wise x <= y.
    pub fn le(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.coords.iter().zip(&other.coords).all(|(&a, &b)| a <= b)
    }
}

/// Both lattice operations at once: (x ∨ y, x ∧ y).
pub fn lattice_ops<T: Real>(x: &Point<T>, y: &Point<T>) -> Result<(Point<T>, Point<T>)> {
    Ok((x.join(y)?, x.meet(y)?))
}

impl<T> Index<usize> for Point<T> {
    type Output = T;

    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

/// The feasible box [a, b] ⊆ R^n with a <= b coordinate-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain<T> {
    lower: Point<T>,
    upper: Point<T>,
}

impl<T: Real> BoxDomain<T> {
    pub fn new(lower: Point<T>, upper: Point<T>) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::LengthMismatch { left: lower.dim(), right: upper.dim() });
        }
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::NonFinite("box bounds"));
        }
        for i in 0..lower.dim() {
            if lower[i] > upper[i] {
                return Err(Error::InvalidParameter(format!(
                    "box bound a[{i}] = {} exceeds b[{i}] = {}",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// The unit box [0, 1]^n used by all mean-field objectives.
    pub fn unit(n: usize) -> Self {
        BoxDomain { lower: Point::zeros(n), upper: Point::ones(n) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Point<T> {
        &self.upper
    }

    /// Checks a <= x <= b, naming the first violating coordinate.
    pub fn contains(&self, x: &Point<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::LengthMismatch { left: x.dim(), right: self.dim() });
        }
        for i in 0..self.dim() {
            if !(x[i] >= self.lower[i] && x[i] <= self.upper[i]) {
                return Err(Error::OutsideDomain {
                    index: i,
                    value: x[i].as_f64(),
                    lo: self.lower[i].as_f64(),
                    hi: self.upper[i].as_f64(),
                });
            }
        }
        Ok(())
    }
}

/// A subset of the ground set, stored as an indicator vector so that ground
/// sets beyond 64 elements work too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subset {
    ind: Vec<bool>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset { ind: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Subset { ind: vec![true; n] }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut ind = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            ind[i] = true;
        }
        Ok(Subset { ind })
    }

    /// Subset from the low n bits of a mask; requires n <= 64.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::GroundSetTooLarge { op: "subset from mask", n, max: 64 });
        }
        Ok(Subset { ind: (0..n).map(|i| mask >> i & 1 == 1).collect() })
    }

    pub fn from_indicator(ind: Vec<bool>) -> Self {
        Subset { ind }
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.ind.len()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.ind.get(i).copied().unwrap_or(false)
    }

    pub fn cardinality(&self) -> usize {
        self.ind.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.ind.iter().all(|&b| !b)
    }

    #[inline]
    pub fn indicator(&self) -> &[bool] {
        &self.ind
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.ind.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn with(&self, i: usize) -> Result<Self> {
        if i >= self.ind.len() {
            return Err(Error::IndexOutOfRange { index: i, n: self.ind.len() });
        }
        let mut ind = self.ind.clone();
        ind[i] = true;
        Ok(Subset { ind })
    }

    pub fn without(&self, i: usize) -> Result<Self> {
        if i >= self.ind.len() {
            return Err(Error::IndexOutOfRange { index: i, n: self.ind.len() });
        }
        let mut ind = self.ind.clone();
        ind[i] = false;
        Ok(Subset { ind })
    }

    pub fn complement(&self) -> Self {
        Subset { ind: self.ind.iter().map(|&b| !b).collect() }
    }

    /// Bitmask view for n <= 64.
    pub fn as_mask(&self) -> Option<u64> {
        if self.ind.len() > 64 {
            return None;
        }
        let mut m = 0u64;
        for (i, &b) in self.ind.iter().enumerate() {
            if b {
                m |= 1 << i;
            }
        }
        Some(m)
    }

    /// The 0/1 vertex 1_S of the unit box.
    pub fn vertex<T: Real>(&self) -> Point<T> {
        Point::new(self.ind.iter().map(|&b| if b { T::one() } else { T::zero() }).collect())
    }
}

/// The 1-D maximization result returned by [`DrObjective::coord_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordMax<T> {
    /// Maximizer u of the 1-D restriction, inside [a_i, b_i].
    pub arg: T,
    /// f(x with i←u) − f(x).
    pub gain: T,
}

/// A box-constrained continuous DR-submodular objective.
///
/// Implementations must guarantee, for `coord_max(i, x) = (u, gain)`:
/// `f(x with i←u) >= max_{u'} f(x with i←u') − δ/n` with δ the additive
/// 1-D error budget reported by [`DrObjective::one_d_error`], and
/// `gain = f(x with i←u) − f(x)`. With δ = 0 the returned gain is
/// non-negative up to floating-point slack.
pub trait DrObjective<T: Real> {
    /// The feasible box.
    fn domain(&self) -> &BoxDomain<T>;

    /// Objective value at a feasible point.
    fn value(&self, x: &Point<T>) -> Result<T>;

    /// Exact or approximate maximizer of the 1-D restriction at coordinate i.
    fn coord_max(&self, i: usize, x: &Point<T>) -> Result<CoordMax<T>>;

    /// Additive error budget δ >= 0 of the 1-D solver, summed over one sweep.
    fn one_d_error(&self) -> T {
        T::zero()
    }

    fn dim(&self) -> usize {
        self.domain().dim()
    }
}
