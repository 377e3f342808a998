//! Submodular set-function families.
//!
//! Each family evaluates F(S) on an explicit subset and validates its own
//! structural invariants at construction time (shapes, signs, finiteness).
//! Submodularity itself can be certified on demand: exhaustively for n <= 20,
//! by randomized spot checks beyond that.

use crate::domain::{GroundSet, Subset};
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::scalar::Real;

pub const ENUMERATION_LIMIT: usize = 20;

fn ensure_finite<T: Real>(v: T, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{what} is not finite")))
    }
}

/// Facility-location diversity model:
/// F(S) = Σ_{i∈S} u'_i + Σ_d max_{i∈S} W_{i,d},  u'_i = u_i − Σ_d W_{i,d}.
///
/// With u'_i = 0 this is plain facility location. Utilities u may take any
/// real value (they enter modularly, so submodularity is unaffected).
#[derive(Debug, Clone, PartialEq)]
pub struct FlidModel<T> {
    n: usize,
    d: usize,
    w: Vec<Vec<T>>,
    u: Vec<T>,
    u_residual: Vec<T>,
}

impl<T: Real> FlidModel<T> {
    pub fn new(w: Vec<Vec<T>>, u: Vec<T>) -> Result<Self> {
        let n = w.len();
        if n == 0 {
            return Err(Error::InvalidModel("W must have at least one row".into()));
        }
        if u.len() != n {
            return Err(Error::InvalidModel(format!(
                "u has {} entries but W has {} rows",
                u.len(),
                n
            )));
        }
        let d = w[0].len();
        if d == 0 {
            return Err(Error::InvalidModel("W must have at least one column".into()));
        }
        for (i, row) in w.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidModel(format!(
                    "W[{i}] has {} entries, expected D = {d}",
                    row.len()
                )));
            }
            for (dd, &v) in row.iter().enumerate() {
                ensure_finite(v, &format!("W[{i}][{dd}]"))?;
                if v < T::zero() {
                    return Err(Error::InvalidModel(format!(
                        "W[{i}][{dd}] = {v}: latent weights must be non-negative"
                    )));
                }
            }
        }
        for (i, &v) in u.iter().enumerate() {
            ensure_finite(v, &format!("u[{i}]"))?;
        }
        let u_residual = (0..n)
            .map(|i| u[i] - w[i].iter().copied().fold(T::zero(), |a, b| a + b))
            .collect();
        Ok(FlidModel { n, d, w, u, u_residual })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn latent_dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn weight(&self, i: usize, d: usize) -> T {
        self.w[i][d]
    }

    pub fn weights(&self) -> &[Vec<T>] {
        &self.w
    }

    pub fn utilities(&self) -> &[T] {
        &self.u
    }

    /// u'_i = u_i − Σ_d W_{i,d}.
    pub fn residual_utilities(&self) -> &[T] {
        &self.u_residual
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let mut acc = T::zero();
        let mut any = false;
        for (i, &member) in ind.iter().enumerate() {
            if member {
                acc = acc + self.u_residual[i];
                any = true;
            }
        }
        if !any {
            return T::zero();
        }
        for d in 0..self.d {
            let mut mx = T::neg_infinity();
            for (i, &member) in ind.iter().enumerate() {
                if member && self.w[i][d] > mx {
                    mx = self.w[i][d];
                }
            }
            acc = acc + mx;
        }
        acc
    }
}

/// Weighted cut objective over a graph without self-loops.
///
/// Directed:   F(S) = Σ_{(i,j)} w_ij v_i (1 − v_j);
/// undirected: F(S) = ½ Σ_{(i,j)} w_ij (v_i + v_j − 2 v_i v_j),
/// with v the indicator of S. Duplicate edges are merged by summing weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CutGraph<T> {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize, T)>,
}

impl<T: Real> CutGraph<T> {
    pub fn new(n: usize, directed: bool, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        GroundSet::new(n)?;
        let mut canon: Vec<(usize, usize, T)> = Vec::new();
        for (k, &(src, dst, w)) in edges.iter().enumerate() {
            if src >= n || dst >= n {
                return Err(Error::InvalidModel(format!(
                    "edges[{k}] = ({src}, {dst}) references a vertex outside 0..{n}"
                )));
            }
            if src == dst {
                return Err(Error::InvalidModel(format!("edges[{k}] is a self-loop at {src}")));
            }
            ensure_finite(w, &format!("edges[{k}] weight"))?;
            if w < T::zero() {
                return Err(Error::InvalidModel(format!(
                    "edges[{k}] weight {w} is negative"
                )));
            }
            let key = if directed || src < dst { (src, dst) } else { (dst, src) };
            match canon.iter_mut().find(|(a, b, _)| (*a, *b) == key) {
                Some(entry) => entry.2 = entry.2 + w,
                None => canon.push((key.0, key.1, w)),
            }
        }
        canon.sort_by_key(|&(a, b, _)| (a, b));
        Ok(CutGraph { n, directed, edges: canon })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let half = T::of(0.5);
        let mut acc = T::zero();
        for &(i, j, w) in &self.edges {
            if self.directed {
                if ind[i] && !ind[j] {
                    acc = acc + w;
                }
            } else if ind[i] != ind[j] {
                acc = acc + half * w;
            }
        }
        acc
    }
}

/// Polynomial energy with a finite order of interactions:
/// F(v) = Σ_T θ_T Π_{i∈T} v_i over non-empty variable sets T.
///
/// `new` enforces the sufficient sign condition θ_T <= 0 for |T| >= 2, which
/// guarantees a DR-submodular multilinear extension (the Ising case is
/// non-positive pairwise interactions). `new_unchecked` skips the sign rule
/// and defers validation to the submodularity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsPolynomial<T> {
    n: usize,
    terms: Vec<(Vec<usize>, T)>,
}

impl<T: Real> GibbsPolynomial<T> {
    pub fn new(n: usize, terms: Vec<(Vec<usize>, T)>) -> Result<Self> {
        let g = Self::new_unchecked(n, terms)?;
        for (vars, coeff) in &g.terms {
            if vars.len() >= 2 && *coeff > T::zero() {
                return Err(Error::InvalidModel(format!(
                    "interaction term {vars:?} has positive coefficient {coeff}; \
                     only non-positive interactions are accepted without an explicit override"
                )));
            }
        }
        Ok(g)
    }

    /// Builds the polynomial without the sign condition on interaction
    /// terms. The result may fail `check_submodular_*`.
    pub fn new_unchecked(n: usize, terms: Vec<(Vec<usize>, T)>) -> Result<Self> {
        GroundSet::new(n)?;
        let mut canon: Vec<(Vec<usize>, T)> = Vec::new();
        for (k, (vars, coeff)) in terms.into_iter().enumerate() {
            if vars.is_empty() {
                return Err(Error::InvalidModel(format!("terms[{k}] has an empty variable set")));
            }
            ensure_finite(coeff, &format!("terms[{k}] coefficient"))?;
            let mut vars = vars;
            vars.sort_unstable();
            for pair in vars.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::InvalidModel(format!(
                        "terms[{k}] repeats variable {}",
                        pair[0]
                    )));
                }
            }
            if let Some(&big) = vars.last() {
                if big >= n {
                    return Err(Error::InvalidModel(format!(
                        "terms[{k}] references variable {big} outside 0..{n}"
                    )));
                }
            }
            match canon.iter_mut().find(|(v, _)| *v == vars) {
                Some(entry) => entry.1 = entry.1 + coeff,
                None => canon.push((vars, coeff)),
            }
        }
        canon.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(GibbsPolynomial { n, terms: canon })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<usize>, T)] {
        &self.terms
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|(v, _)| v.len()).max().unwrap_or(0)
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let mut acc = T::zero();
        for (vars, coeff) in &self.terms {
            if vars.iter().all(|&i| ind[i]) {
                acc = acc + *coeff;
            }
        }
        acc
    }
}

/// Weighted set cover: F(S) = Σ_c m_c · [S ∩ Γ⁻¹(c) ≠ ∅], where Γ⁻¹(c) is
/// the set of items covering concept c.
#[derive(Debug, Clone, PartialEq)]
pub struct SetCoverInstance<T> {
    n: usize,
    concepts: Vec<(T, Vec<usize>)>,
}

impl<T: Real> SetCoverInstance<T> {
    pub fn new(n: usize, concepts: Vec<(T, Vec<usize>)>) -> Result<Self> {
        GroundSet::new(n)?;
        let mut canon = Vec::with_capacity(concepts.len());
        for (c, (weight, items)) in concepts.into_iter().enumerate() {
            ensure_finite(weight, &format!("concepts[{c}] weight"))?;
            if weight < T::zero() {
                return Err(Error::InvalidModel(format!(
                    "concepts[{c}] weight {weight} is negative"
                )));
            }
            if items.is_empty() {
                return Err(Error::InvalidModel(format!("concepts[{c}] covers no items")));
            }
            let mut items = items;
            items.sort_unstable();
            items.dedup();
            if let Some(&big) = items.last() {
                if big >= n {
                    return Err(Error::InvalidModel(format!(
                        "concepts[{c}] references item {big} outside 0..{n}"
                    )));
                }
            }
            canon.push((weight, items));
        }
        Ok(SetCoverInstance { n, concepts: canon })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn concepts(&self) -> &[(T, Vec<usize>)] {
        &self.concepts
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let mut acc = T::zero();
        for (weight, items) in &self.concepts {
            if items.iter().any(|&i| ind[i]) {
                acc = acc + *weight;
            }
        }
        acc
    }
}

/// Explicit value table over all 2^n subsets, `values[mask] = F(S(mask))`
/// with bit i of the mask indicating membership of element i. Brute-force
/// oracle carrier; n is capped at 20.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFunction<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> TableFunction<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        GroundSet::new(n)?;
        if n > ENUMERATION_LIMIT {
            return Err(Error::GroundSetTooLarge { op: "table function", n, max: ENUMERATION_LIMIT });
        }
        if values.len() != 1usize << n {
            return Err(Error::InvalidModel(format!(
                "table has {} values, expected 2^{n} = {}",
                values.len(),
                1usize << n
            )));
        }
        for (mask, &v) in values.iter().enumerate() {
            ensure_finite(v, &format!("values[{mask}]"))?;
        }
        Ok(TableFunction { n, values })
    }

    /// Tabulates any other family into an explicit table (n <= 20).
    pub fn tabulate(f: &SetFunction<T>) -> Result<Self> {
        let n = f.ground_size();
        if n > ENUMERATION_LIMIT {
            return Err(Error::GroundSetTooLarge { op: "tabulate", n, max: ENUMERATION_LIMIT });
        }
        let mut ind = vec![false; n];
        let values = (0u64..1 << n)
            .map(|mask| {
                for (i, slot) in ind.iter_mut().enumerate() {
                    *slot = mask >> i & 1 == 1;
                }
                f.eval_indicator(&ind)
            })
            .collect();
        Ok(TableFunction { n, values })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let mut mask = 0usize;
        for (i, &b) in ind.iter().enumerate() {
            if b {
                mask |= 1 << i;
            }
        }
        self.values[mask]
    }
}

/// Modular function F(S) = Σ_{i∈S} c_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularFunction<T> {
    weights: Vec<T>,
}

impl<T: Real> ModularFunction<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        GroundSet::new(weights.len())?;
        for (i, &w) in weights.iter().enumerate() {
            ensure_finite(w, &format!("weights[{i}]"))?;
        }
        Ok(ModularFunction { weights })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let mut acc = T::zero();
        for (i, &b) in ind.iter().enumerate() {
            if b {
                acc = acc + self.weights[i];
            }
        }
        acc
    }
}

/// Concave-over-modular function F(S) = Σ_j w_j (Σ_{i∈S} m^j_i)^a with
/// w_j >= 0, m^j >= 0 entry-wise and exponent a ∈ (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveOverModular<T> {
    n: usize,
    weights: Vec<T>,
    vectors: Vec<Vec<T>>,
    exponent: T,
}

impl<T: Real> ConcaveOverModular<T> {
    pub fn new(n: usize, weights: Vec<T>, vectors: Vec<Vec<T>>, exponent: T) -> Result<Self> {
        GroundSet::new(n)?;
        if !(exponent > T::zero() && exponent <= T::one()) {
            return Err(Error::InvalidModel(format!(
                "exponent {exponent} outside (0, 1]"
            )));
        }
        if weights.len() != vectors.len() {
            return Err(Error::InvalidModel(format!(
                "{} weights but {} modular vectors",
                weights.len(),
                vectors.len()
            )));
        }
        for (j, &w) in weights.iter().enumerate() {
            ensure_finite(w, &format!("weights[{j}]"))?;
            if w < T::zero() {
                return Err(Error::InvalidModel(format!("weights[{j}] = {w} is negative")));
            }
        }
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::InvalidModel(format!(
                    "modular vector {j} has {} entries, expected {n}",
                    v.len()
                )));
            }
            for (i, &e) in v.iter().enumerate() {
                ensure_finite(e, &format!("m[{j}][{i}]"))?;
                if e < T::zero() {
                    return Err(Error::InvalidModel(format!(
                        "m[{j}][{i}] = {e} is negative"
                    )));
                }
            }
        }
        Ok(ConcaveOverModular { n, weights, vectors, exponent })
    }

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }

    /// Modular surrogate F̂(S) = Σ_j w_j Σ_{i∈S} (m^j_i)^a, i.e. per-item
    /// weight Σ_j w_j (m^j_i)^a. Exact for a = 1.
    pub fn modular_approximation(&self) -> ModularFunction<T> {
        let weights = (0..self.n)
            .map(|i| {
                self.weights
                    .iter()
                    .zip(&self.vectors)
                    .map(|(&w, v)| w * v[i].powf(self.exponent))
                    .fold(T::zero(), |a, b| a + b)
            })
            .collect();
        ModularFunction { weights }
    }

    fn eval_indicator(&self, ind: &[bool]) -> T {
        let mut acc = T::zero();
        for (&w, v) in self.weights.iter().zip(&self.vectors) {
            let mut s = T::zero();
            for (i, &b) in ind.iter().enumerate() {
                if b {
                    s = s + v[i];
                }
            }
            // 0^a = 0 for a in (0,1], keeping F(∅) = 0 exact.
            if s > T::zero() {
                acc = acc + w * s.powf(self.exponent);
            }
        }
        acc
    }
}

/// Tagged family of set-function models.
#[derive(Debug, Clone, PartialEq)]
pub enum SetFunction<T> {
    Flid(FlidModel<T>),
    Cut(CutGraph<T>),
    Gibbs(GibbsPolynomial<T>),
    SetCover(SetCoverInstance<T>),
    Table(TableFunction<T>),
    Modular(ModularFunction<T>),
    ConcaveOverModular(ConcaveOverModular<T>),
}

/// Outcome of a submodularity check.
#[derive(Debug, Clone, PartialEq)]
pub enum SubmodularityVerdict {
    /// Every inspected triple satisfied the diminishing-returns inequality.
    /// In exhaustive mode this is a proof by enumeration.
    Holds { checks: usize },
    /// A violating triple S ⊆ T, i ∉ T with F(S∪{i})−F(S) < F(T∪{i})−F(T).
    Violated {
        smaller: Subset,
        larger: Subset,
        element: usize,
        deficit: f64,
    },
}

impl SubmodularityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SubmodularityVerdict::Holds { .. })
    }
}

const SUBMODULARITY_SLACK: f64 = 1e-9;

impl<T: Real> SetFunction<T> {
    pub fn ground_size(&self) -> usize {
        match self {
            SetFunction::Flid(m) => m.ground_size(),
            SetFunction::Cut(m) => m.ground_size(),
            SetFunction::Gibbs(m) => m.ground_size(),
            SetFunction::SetCover(m) => m.ground_size(),
            SetFunction::Table(m) => m.ground_size(),
            SetFunction::Modular(m) => m.ground_size(),
            SetFunction::ConcaveOverModular(m) => m.ground_size(),
        }
    }

    pub fn ground_set(&self) -> GroundSet {
        GroundSet::new(self.ground_size()).expect("models are non-empty by construction")
    }

    pub fn family(&self) -> &'static str {
        match self {
            SetFunction::Flid(_) => "flid",
            SetFunction::Cut(_) => "cut",
            SetFunction::Gibbs(_) => "gibbs",
            SetFunction::SetCover(_) => "set_cover",
            SetFunction::Table(_) => "table",
            SetFunction::Modular(_) => "modular",
            SetFunction::ConcaveOverModular(_) => "concave_over_modular",
        }
    }

    /// F(S).
    pub fn eval(&self, s: &Subset) -> Result<T> {
        if s.ground_size() != self.ground_size() {
            return Err(Error::LengthMismatch {
                left: s.ground_size(),
                right: self.ground_size(),
            });
        }
        Ok(self.eval_indicator(s.indicator()))
    }

    /// Hot path used by enumeration loops; `ind` must have length n.
    pub(crate) fn eval_indicator(&self, ind: &[bool]) -> T {
        debug_assert_eq!(ind.len(), self.ground_size());
        match self {
            SetFunction::Flid(m) => m.eval_indicator(ind),
            SetFunction::Cut(m) => m.eval_indicator(ind),
            SetFunction::Gibbs(m) => m.eval_indicator(ind),
            SetFunction::SetCover(m) => m.eval_indicator(ind),
            SetFunction::Table(m) => m.eval_indicator(ind),
            SetFunction::Modular(m) => m.eval_indicator(ind),
            SetFunction::ConcaveOverModular(m) => m.eval_indicator(ind),
        }
    }

    /// The same family with all values scaled by `factor > 0` (weights,
    /// coefficients or table entries as appropriate). Scaling by a positive
    /// factor preserves every structural invariant and submodularity.
    pub fn scaled(&self, factor: T) -> Result<SetFunction<T>> {
        if !(factor > T::zero() && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor {factor} must be positive and finite"
            )));
        }
        Ok(match self {
            SetFunction::Flid(m) => SetFunction::Flid(FlidModel {
                n: m.n,
                d: m.d,
                w: m.w.iter().map(|row| row.iter().map(|&v| v * factor).collect()).collect(),
                u: m.u.iter().map(|&v| v * factor).collect(),
                u_residual: m.u_residual.iter().map(|&v| v * factor).collect(),
            }),
            SetFunction::Cut(m) => SetFunction::Cut(CutGraph {
                n: m.n,
                directed: m.directed,
                edges: m.edges.iter().map(|&(a, b, w)| (a, b, w * factor)).collect(),
            }),
            SetFunction::Gibbs(m) => SetFunction::Gibbs(GibbsPolynomial {
                n: m.n,
                terms: m.terms.iter().map(|(v, c)| (v.clone(), *c * factor)).collect(),
            }),
            SetFunction::SetCover(m) => SetFunction::SetCover(SetCoverInstance {
                n: m.n,
                concepts: m.concepts.iter().map(|(w, it)| (*w * factor, it.clone())).collect(),
            }),
            SetFunction::Table(m) => SetFunction::Table(TableFunction {
                n: m.n,
                values: m.values.iter().map(|&v| v * factor).collect(),
            }),
            SetFunction::Modular(m) => SetFunction::Modular(ModularFunction {
                weights: m.weights.iter().map(|&v| v * factor).collect(),
            }),
            SetFunction::ConcaveOverModular(m) => {
                SetFunction::ConcaveOverModular(ConcaveOverModular {
                    n: m.n,
                    weights: m.weights.iter().map(|&v| v * factor).collect(),
                    vectors: m.vectors.clone(),
                    exponent: m.exponent,
                })
            }
        })
    }

    /// Proof-by-enumeration submodularity check for n <= 20.
    ///
    /// Enumerates the local condition F(S∪{i,j}) − F(S∪{j}) <= F(S∪{i}) − F(S)
    /// for every S and i ≠ j outside S, which is equivalent to the
    /// diminishing-returns inequality over all nested pairs.
    pub fn check_submodular_exhaustive(&self) -> Result<SubmodularityVerdict> {
        let n = self.ground_size();
        if n > ENUMERATION_LIMIT {
            return Err(Error::GroundSetTooLarge {
                op: "exhaustive submodularity check",
                n,
                max: ENUMERATION_LIMIT,
            });
        }
        let table = TableFunction::tabulate(self)?;
        let values = table.values();
        let mut checks = 0usize;
        for mask in 0u64..1 << n {
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    continue;
                }
                for j in (i + 1)..n {
                    if mask >> j & 1 == 1 {
                        continue;
                    }
                    checks += 1;
                    let s = mask as usize;
                    let si = s | 1 << i;
                    let sj = s | 1 << j;
                    let sij = si | 1 << j;
                    // diminishing returns of i when j joins the base set
                    let lhs = values[si] - values[s];
                    let rhs = values[sij] - values[sj];
                    let deficit = (rhs - lhs).as_f64();
                    if deficit > SUBMODULARITY_SLACK {
                        return Ok(SubmodularityVerdict::Violated {
                            smaller: Subset::from_mask(n, mask)?,
                            larger: Subset::from_mask(n, mask | 1 << j)?,
                            element: i,
                            deficit,
                        });
                    }
                }
            }
        }
        Ok(SubmodularityVerdict::Holds { checks })
    }

    /// Randomized spot check over sampled triples S ⊆ T, i ∉ T; works for
    /// any ground-set size.
    pub fn check_submodular_sampled(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<SubmodularityVerdict> {
        if samples == 0 {
            return Err(Error::InvalidParameter("sample count must be >= 1".into()));
        }
        let n = self.ground_size();
        let mut rng = DetRng::derived(seed, 0x5b0d);
        let mut checks = 0usize;
        for _ in 0..samples {
            let mut larger = vec![false; n];
            let mut smaller = vec![false; n];
            for i in 0..n {
                larger[i] = rng.uniform01() < 0.5;
                smaller[i] = larger[i] && rng.uniform01() < 0.5;
            }
            let outside: Vec<usize> = (0..n).filter(|&i| !larger[i]).collect();
            if outside.is_empty() {
                continue;
            }
            let i = outside[rng.below(outside.len())];
            checks += 1;
            let f_t = self.eval_indicator(&larger);
            let f_s = self.eval_indicator(&smaller);
            larger[i] = true;
            smaller[i] = true;
            let f_ti = self.eval_indicator(&larger);
            let f_si = self.eval_indicator(&smaller);
            larger[i] = false;
            smaller[i] = false;
            let deficit = ((f_ti - f_t) - (f_si - f_s)).as_f64();
            if deficit > SUBMODULARITY_SLACK {
                return Ok(SubmodularityVerdict::Violated {
                    smaller: Subset::from_indicator(smaller),
                    larger: Subset::from_indicator(larger),
                    element: i,
                    deficit,
                });
            }
        }
        Ok(SubmodularityVerdict::Holds { checks })
    }
}
