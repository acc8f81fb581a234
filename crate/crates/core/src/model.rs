//! Stochastic block models: specification, sampling, and the expected / ground-truth objects.
//!
//! Three variants are supported. The classical model `G(n, p, q)` has two communities of
//! size `n/2`; the balanced planted partition has `K` communities of size `s`; the general
//! model takes an explicit matrix of edge probabilities together with a community
//! assignment and thresholds `p ≥ q` that every within / across probability must respect.
//! Every graph carries a self-loop at each vertex, so adjacency diagonals are all ones.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, SymmetricMatrix};
use crate::rng;
use crate::scalar::Scalar;

/// Community labels `1..=K`, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl CommunityAssignment {
    /// Labels must lie in `1..=k`; communities may be empty.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 && !labels.is_empty() {
            return Err(Error::validation("community count must be at least 1"));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l == 0 || l > k) {
            return Err(Error::validation(format!(
                "label {l} of vertex {} outside 1..={k}",
                i + 1
            )));
        }
        Ok(Self { labels, k })
    }

    /// Infers `K` as the largest label and requires every community `1..=K` to be nonempty.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(0);
        let a = Self::new(labels, k)?;
        if let Some(c) = a.sizes().iter().position(|&s| s == 0) {
            return Err(Error::validation(format!("community {} is empty", c + 1)));
        }
        Ok(a)
    }

    /// Consecutive blocks: the first `sizes[0]` vertices get label 1, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat(c + 1).take(s))
            .collect();
        Self {
            labels,
            k: sizes.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of communities `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l - 1] += 1;
        }
        sizes
    }

    #[inline]
    pub fn same(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }
}

/// One of the three block-model variants.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    /// Two communities `{1..n/2}` and `{n/2+1..n}`.
    Classical { n: usize, p: f64, q: f64 },
    /// Explicit edge probabilities with thresholds: `p_ij ≥ p` within communities, `p_ij ≤ q`
    /// across, `p_ii = 1`.
    General {
        prob: SymmetricMatrix<f64>,
        assignment: CommunityAssignment,
        p: f64,
        q: f64,
    },
    /// `k` communities of `s` consecutive vertices each.
    Balanced { k: usize, s: usize, p: f64, q: f64 },
}

impl ModelSpec {
    pub fn classical(n: usize, p: f64, q: f64) -> Result<Self> {
        let spec = ModelSpec::Classical { n, p, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn balanced(k: usize, s: usize, p: f64, q: f64) -> Result<Self> {
        let spec = ModelSpec::Balanced { k, s, p, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn general(
        prob: SymmetricMatrix<f64>,
        assignment: CommunityAssignment,
        p: f64,
        q: f64,
    ) -> Result<Self> {
        let spec = ModelSpec::General {
            prob,
            assignment,
            p,
            q,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// General model whose probabilities are exactly `p` within and `q` across communities.
    pub fn general_two_level(assignment: CommunityAssignment, p: f64, q: f64) -> Result<Self> {
        let n = assignment.len();
        let prob = SymmetricMatrix::from_upper_fn(n, |i, j| {
            if i == j {
                1.0
            } else if assignment.same(i, j) {
                p
            } else {
                q
            }
        });
        Self::general(prob, assignment, p, q)
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = self.thresholds();
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
            return Err(Error::validation(format!(
                "probabilities must lie in [0, 1] (p = {p}, q = {q})"
            )));
        }
        if q > p {
            return Err(Error::validation(format!(
                "constraint q <= p violated (p = {p}, q = {q})"
            )));
        }
        match self {
            ModelSpec::Classical { n, .. } => {
                if *n == 0 || n % 2 != 0 {
                    return Err(Error::validation(format!(
                        "classical model needs a positive even n, got {n}"
                    )));
                }
            }
            ModelSpec::Balanced { k, s, .. } => {
                if *k == 0 || *s == 0 {
                    return Err(Error::validation(format!(
                        "balanced model needs k >= 1 and s >= 1 (k = {k}, s = {s})"
                    )));
                }
            }
            ModelSpec::General {
                prob,
                assignment,
                p,
                q,
            } => {
                let n = prob.dim();
                if assignment.len() != n {
                    return Err(Error::validation(format!(
                        "assignment has {} labels but the probability matrix is {n}x{n}",
                        assignment.len()
                    )));
                }
                for i in 0..n {
                    if prob[(i, i)] != 1.0 {
                        return Err(Error::validation(format!(
                            "p_ii must equal 1 (vertex {} has {})",
                            i + 1,
                            prob[(i, i)]
                        )));
                    }
                    for j in (i + 1)..n {
                        let pij = prob[(i, j)];
                        let bad = if !(0.0..=1.0).contains(&pij) {
                            Some("outside [0, 1]")
                        } else if assignment.same(i, j) && pij < *p {
                            Some("within-community probability below p")
                        } else if !assignment.same(i, j) && pij > *q {
                            Some("across-community probability above q")
                        } else {
                            None
                        };
                        if let Some(why) = bad {
                            return Err(Error::validation(format!(
                                "p_({},{}) = {pij}: {why}",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Classical { n, .. } => *n,
            ModelSpec::General { prob, .. } => prob.dim(),
            ModelSpec::Balanced { k, s, .. } => k * s,
        }
    }

    /// Number of communities.
    pub fn k(&self) -> usize {
        match self {
            ModelSpec::Classical { .. } => 2,
            ModelSpec::General { assignment, .. } => assignment.k(),
            ModelSpec::Balanced { k, .. } => *k,
        }
    }

    /// `(p, q)`: the within / across probabilities, or the thresholds for the general model.
    pub fn thresholds(&self) -> (f64, f64) {
        match *self {
            ModelSpec::Classical { p, q, .. }
            | ModelSpec::General { p, q, .. }
            | ModelSpec::Balanced { p, q, .. } => (p, q),
        }
    }

    pub fn assignment(&self) -> CommunityAssignment {
        match self {
            ModelSpec::Classical { n, .. } => CommunityAssignment::from_sizes(&[n / 2, n / 2]),
            ModelSpec::General { assignment, .. } => assignment.clone(),
            ModelSpec::Balanced { k, s, .. } => CommunityAssignment::from_sizes(&vec![*s; *k]),
        }
    }

    /// Edge probability of the pair `(i, j)`, with `1` on the diagonal.
    pub fn edge_probability(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        match self {
            ModelSpec::Classical { n, p, q } => {
                if (i < n / 2) == (j < n / 2) {
                    *p
                } else {
                    *q
                }
            }
            ModelSpec::General { prob, .. } => prob[(i, j)],
            ModelSpec::Balanced { s, p, q, .. } => {
                if i / s == j / s {
                    *p
                } else {
                    *q
                }
            }
        }
    }
}

/// Symmetric 0/1 adjacency matrix with a unit diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl AdjacencyMatrix {
    /// Graph with self-loops only.
    pub fn empty(n: usize) -> Self {
        let mut bits = vec![false; n * n];
        for i in 0..n {
            bits[i * n + i] = true;
        }
        Self { n, bits }
    }

    /// Builds from an undirected edge list (0-indexed). Self-loops in the list are ignored
    /// since every vertex carries one anyway.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut a = Self::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::validation(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            a.set(i, j, true);
        }
        Ok(a)
    }

    /// Checks that `m` is symmetric, 0/1 valued, and has a unit diagonal.
    pub fn from_matrix<T: Scalar>(m: &Mat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut a = Self::empty(n);
        for i in 0..n {
            if m[(i, i)] != T::one() {
                return Err(Error::validation(format!(
                    "adjacency diagonal entry {} is not 1",
                    i + 1
                )));
            }
            for j in (i + 1)..n {
                let (x, y) = (m[(i, j)], m[(j, i)]);
                if x != y {
                    return Err(Error::validation(format!(
                        "adjacency not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if x == T::one() {
                    a.set(i, j, true);
                } else if x != T::zero() {
                    return Err(Error::validation(format!(
                        "adjacency entry ({}, {}) is not 0/1",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        if i != j {
            self.bits[i * self.n + j] = v;
            self.bits[j * self.n + i] = v;
        }
    }

    /// Number of edges between distinct vertices, `Σ_{i<j} a_ij`.
    pub fn edge_count(&self) -> u64 {
        (0..self.n)
            .map(|i| ((i + 1)..self.n).filter(|&j| self.get(i, j)).count() as u64)
            .sum()
    }

    /// Pairs `i < j` (0-indexed) joined by an edge, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n)
                .filter(move |&j| self.get(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn to_matrix<T: Scalar>(&self) -> SymmetricMatrix<T> {
        SymmetricMatrix::from_upper_fn(
            self.n,
            |i, j| if self.get(i, j) { T::one() } else { T::zero() },
        )
    }
}

/// Ground-truth objects for a known partition.
#[derive(Clone, Debug)]
pub struct GroundTruth<T> {
    pub assignment: CommunityAssignment,
    /// `x̄_i = +1` if vertex `i` has label 1, `−1` otherwise (two communities only).
    membership: Option<Vec<T>>,
    /// Cluster matrix `Z̄_ij = 1` iff `i`, `j` share a community.
    pub cluster: SymmetricMatrix<T>,
    /// `P̄_ij = (K−1)/n` within, `−1/n` across.
    pub projection: SymmetricMatrix<T>,
}

impl<T: Scalar> GroundTruth<T> {
    pub fn from_assignment(assignment: &CommunityAssignment) -> Self {
        let n = assignment.len();
        let k = assignment.k();
        let membership = (k == 2).then(|| {
            assignment
                .labels()
                .iter()
                .map(|&l| if l == 1 { T::one() } else { -T::one() })
                .collect()
        });
        let cluster = SymmetricMatrix::from_upper_fn(n, |i, j| {
            if assignment.same(i, j) {
                T::one()
            } else {
                T::zero()
            }
        });
        let nf = T::from_usize_lossy(n.max(1));
        let within = T::from_usize_lossy(k.saturating_sub(1)) / nf;
        let across = -T::one() / nf;
        let projection = SymmetricMatrix::from_upper_fn(n, |i, j| {
            if assignment.same(i, j) {
                within
            } else {
                across
            }
        });
        Self {
            assignment: assignment.clone(),
            membership,
            cluster,
            projection,
        }
    }

    /// The `±1` membership vector, defined only for two communities.
    pub fn membership(&self) -> Result<&[T]> {
        self.membership.as_deref().ok_or_else(|| {
            Error::Unsupported(format!(
                "membership vector needs exactly 2 communities, model has {}",
                self.assignment.k()
            ))
        })
    }

    /// `x̄ x̄ᵀ` for two communities.
    pub fn membership_outer(&self) -> Result<SymmetricMatrix<T>> {
        let x = self.membership()?;
        Ok(SymmetricMatrix::from_symmetrized(Mat::outer(x, x)))
    }
}

/// Mean edge variance and the degree-scale parameters of a model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelStatistics {
    /// `p̄ = (2/(n(n−1))) Σ_{i<j} p_ij (1 − p_ij)`.
    pub pbar: f64,
    /// `g = p̄ n`.
    pub g: f64,
    /// `p n`, or `p s` for the balanced model.
    pub a: f64,
    /// `q n`, or `q s` for the balanced model.
    pub b: f64,
}

/// Draws an adjacency matrix: every pair `i < j` is an independent Bernoulli(`p_ij`).
///
/// Pairs are visited row by row and each consumes one uniform `u ∈ [0, 1)` from
/// `rng::stream(seed, 0)`; the edge is present iff `u < p_ij`.
pub fn sample_graph(spec: &ModelSpec, seed: u64) -> Result<AdjacencyMatrix> {
    spec.validate()?;
    let n = spec.n();
    let mut rng = rng::stream(seed, 0);
    let mut a = AdjacencyMatrix::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let u: f64 = rng.random();
            if u < spec.edge_probability(i, j) {
                a.set(i, j, true);
            }
        }
    }
    Ok(a)
}

/// `E A`: off-diagonal entries `p_ij`, unit diagonal.
pub fn expected_adjacency<T: Scalar>(spec: &ModelSpec) -> Result<SymmetricMatrix<T>> {
    spec.validate()?;
    Ok(SymmetricMatrix::from_upper_fn(spec.n(), |i, j| {
        T::lit(spec.edge_probability(i, j))
    }))
}

pub fn ground_truth<T: Scalar>(spec: &ModelSpec) -> Result<GroundTruth<T>> {
    spec.validate()?;
    Ok(GroundTruth::from_assignment(&spec.assignment()))
}

pub fn model_statistics(spec: &ModelSpec) -> Result<ModelStatistics> {
    spec.validate()?;
    let n = spec.n();
    let pbar = pair_mean(spec, |p| p * (1.0 - p));
    let (p, q) = spec.thresholds();
    let scale = match spec {
        ModelSpec::Balanced { s, .. } => *s as f64,
        _ => n as f64,
    };
    Ok(ModelStatistics {
        pbar,
        g: pbar * n as f64,
        a: p * scale,
        b: q * scale,
    })
}

/// `E λ = (2/(n(n−1))) Σ_{i<j} p_ij`, summed directly over all pairs.
///
/// For the classical model this evaluates to `(p+q)/2 − (p−q)/(2(n−1))`. A commonly quoted
/// closed form drops the factor 2 in the last denominator; at `n = 4, p = 1, q = 0` the
/// direct count gives `1/3` where that form gives `1/6`.
pub fn expected_lambda(spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    Ok(pair_mean(spec, |p| p))
}

/// `(2/(n(n−1))) Σ_{i<j} f(p_ij)` with compensated summation; zero when `n < 2`.
fn pair_mean(spec: &ModelSpec, f: impl Fn(f64) -> f64) -> f64 {
    let n = spec.n();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = f(spec.edge_probability(i, j));
            let t = sum + x;
            comp += if sum.abs() >= x.abs() {
                (sum - t) + x
            } else {
                (x - t) + sum
            };
            sum = t;
        }
    }
    2.0 * (sum + comp) / (n as f64 * (n as f64 - 1.0))
}
