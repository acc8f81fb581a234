//! From an SDP solution to community estimates, and the error metrics used to judge them.

use num_rational::Ratio;
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix as WeightMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, frobenius_sq, l1_entrywise, SymmetricMatrix};
use crate::model::{AdjacencyMatrix, CommunityAssignment, GroundTruth};
use crate::rng;
use crate::scalar::Scalar;

/// Number of k-means restarts in [`labels_from_projection`].
pub const KMEANS_RESTARTS: usize = 20;
const KMEANS_MAX_ITER: usize = 300;

/// `λ = (2/(n(n−1))) Σ_{i<j} a_ij` as an exact fraction; 0 for `n < 2`.
pub fn estimate_lambda_exact(a: &AdjacencyMatrix) -> Ratio<u64> {
    let n = a.n() as u64;
    if n < 2 {
        return Ratio::from_integer(0);
    }
    Ratio::new(2 * a.edge_count(), n * (n - 1))
}

/// Average off-diagonal edge density, `λ = (2/(n(n−1))) Σ_{i<j} a_ij`.
pub fn estimate_lambda(a: &AdjacencyMatrix) -> f64 {
    let r = estimate_lambda_exact(a);
    *r.numer() as f64 / *r.denom() as f64
}

/// `Σ_k |C_k|²`, the entry sum of the cluster matrix.
pub fn lambda_cluster_count(assignment: &CommunityAssignment) -> u64 {
    assignment.sizes().iter().map(|&s| (s * s) as u64).sum()
}

/// `√n · v₁` for the unit top eigenvector `v₁`, and its sign pattern as a two-class
/// assignment (label 1 for entries `≥ 0`, label 2 otherwise).
pub fn round_leading_eigenvector<T: Scalar>(
    zhat: &SymmetricMatrix<T>,
) -> Result<(Vec<T>, CommunityAssignment)> {
    let n = zhat.dim();
    if n == 0 {
        return Err(Error::validation("cannot round an empty matrix"));
    }
    let eig = eigh(zhat)?;
    let root_n = T::from_usize_lossy(n).sqrt();
    let xhat: Vec<T> = eig.eigenvector(0).iter().map(|&v| v * root_n).collect();
    let labels = xhat
        .iter()
        .map(|&x| if x >= T::zero() { 1 } else { 2 })
        .collect();
    Ok((xhat, CommunityAssignment::new(labels, 2)?))
}

/// Rank used for the spectral projection of a K-community solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankMode {
    /// `r = 2K − 3`.
    #[serde(rename = "2k-3")]
    TwiceKMinusThree,
    /// `r = K − 1`.
    #[default]
    #[serde(rename = "k-1")]
    KMinusOne,
}

impl RankMode {
    pub fn rank(self, k: usize) -> usize {
        match self {
            RankMode::TwiceKMinusThree => (2 * k).saturating_sub(3),
            RankMode::KMinusOne => k.saturating_sub(1),
        }
    }
}

impl std::str::FromStr for RankMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2k-3" => Ok(RankMode::TwiceKMinusThree),
            "k-1" => Ok(RankMode::KMinusOne),
            other => Err(Error::validation(format!(
                "unknown rank mode '{other}' (expected 2k-3 or k-1)"
            ))),
        }
    }
}

impl std::fmt::Display for RankMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RankMode::TwiceKMinusThree => "2k-3",
            RankMode::KMinusOne => "k-1",
        })
    }
}

/// Orthogonal projection onto the top-`r` eigenvectors of `zhat`, `r` from `mode`.
pub fn spectral_projection<T: Scalar>(
    zhat: &SymmetricMatrix<T>,
    k: usize,
    mode: RankMode,
) -> Result<SymmetricMatrix<T>> {
    if k < 2 {
        return Err(Error::validation(format!(
            "spectral projection needs K >= 2, got {k}"
        )));
    }
    top_projection(zhat, mode.rank(k))
}

/// `V_r V_rᵀ` for the top `r` eigenvectors; requires `1 ≤ r < n`.
pub fn top_projection<T: Scalar>(
    zhat: &SymmetricMatrix<T>,
    r: usize,
) -> Result<SymmetricMatrix<T>> {
    let n = zhat.dim();
    if r == 0 || r >= n {
        return Err(Error::validation(format!(
            "projection rank {r} must satisfy 1 <= r < n = {n}"
        )));
    }
    Ok(SymmetricMatrix::from_symmetrized(
        eigh(zhat)?.top_projection(r),
    ))
}

/// k-means with `k` clusters on the rows of `phat`: k-means++ seeding, Lloyd iterations,
/// [`KMEANS_RESTARTS`] restarts, lowest within-cluster sum of squares kept.
///
/// Labels are numbered by first appearance, so vertex 0 always gets label 1. A restart that
/// ends with an empty cluster is discarded.
pub fn labels_from_projection<T: Scalar>(
    phat: &SymmetricMatrix<T>,
    k: usize,
    seed: u64,
) -> Result<CommunityAssignment> {
    let n = phat.dim();
    if k == 0 {
        return Err(Error::validation("k-means needs at least one cluster"));
    }
    if k == 1 {
        return CommunityAssignment::new(vec![1; n], 1);
    }
    if k > n {
        return Err(Error::validation(format!(
            "cannot form {k} clusters from {n} rows"
        )));
    }
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| phat.as_mat().row(i).iter().map(|x| x.as_f64()).collect())
        .collect();
    let mut distinct: Vec<&Vec<f64>> = Vec::new();
    for p in &points {
        if distinct.len() < k && !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    if distinct.len() < k {
        return Err(Error::Unsupported(format!(
            "{} distinct rows cannot form {k} clusters",
            distinct.len()
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = rng::stream(seed, restart as u64);
        if let Some((cost, assign)) = kmeans_once(&points, k, &mut rng) {
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, assign));
            }
        }
    }
    let Some((_, assign)) = best else {
        return Err(Error::Internal(format!(
            "k-means: all {KMEANS_RESTARTS} restarts left a cluster empty"
        )));
    };
    let mut relabel = vec![0usize; k];
    let mut next = 1;
    let labels = assign
        .iter()
        .map(|&c| {
            if relabel[c] == 0 {
                relabel[c] = next;
                next += 1;
            }
            relabel[c]
        })
        .collect();
    CommunityAssignment::new(labels, k)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kmeans_once(points: &[Vec<f64>], k: usize, rng: &mut rng::Rng) -> Option<(f64, Vec<usize>)> {
    let n = points.len();
    let dim = points[0].len();
    let mut centers: Vec<Vec<f64>> = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[idx].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }

    let mut assign = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = (f64::INFINITY, 0);
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(p, center);
                if d < best.0 {
                    best = (d, c);
                }
            }
            if assign[i] != best.1 {
                assign[i] = best.1;
                changed = true;
            }
        }
        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &c) in points.iter().zip(&assign) {
            counts[c] += 1;
            for (s, &x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        if counts.contains(&0) {
            return None;
        }
        for ((center, sum), &count) in centers.iter_mut().zip(sums).zip(&counts) {
            *center = sum.into_iter().map(|s| s / count as f64).collect();
        }
        if !changed {
            break;
        }
    }
    let cost = points
        .iter()
        .zip(&assign)
        .map(|(p, &c)| sq_dist(p, &centers[c]))
        .sum();
    Some((cost, assign))
}

fn confusion(est: &CommunityAssignment, truth: &CommunityAssignment) -> Result<Vec<Vec<i64>>> {
    if est.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: est.len(),
        });
    }
    let m = est.k().max(truth.k());
    let mut c = vec![vec![0i64; m]; m];
    for (&e, &t) in est.labels().iter().zip(truth.labels()) {
        c[e - 1][t - 1] += 1;
    }
    Ok(c)
}

/// Smallest fraction of vertices whose labels disagree over all bijective relabelings of
/// `est`, by maximum-weight matching on the (zero-padded) confusion matrix.
pub fn misclassification(est: &CommunityAssignment, truth: &CommunityAssignment) -> Result<f64> {
    let c = confusion(est, truth)?;
    let n = truth.len();
    if n == 0 {
        return Ok(0.0);
    }
    let weights = WeightMatrix::from_rows(c.clone()).map_err(|e| Error::Internal(e.to_string()))?;
    let (agree, _) = kuhn_munkres(&weights);
    debug_assert!(c.len() > 6 || agree == best_agreement_by_enumeration(&c));
    Ok((n as i64 - agree) as f64 / n as f64)
}

/// [`misclassification`] by enumerating every relabeling; for at most 8 labels.
pub fn misclassification_by_enumeration(
    est: &CommunityAssignment,
    truth: &CommunityAssignment,
) -> Result<f64> {
    let c = confusion(est, truth)?;
    if c.len() > 8 {
        return Err(Error::TooLarge {
            what: "relabeling enumeration",
            n: c.len(),
            max: 8,
        });
    }
    let n = truth.len();
    if n == 0 {
        return Ok(0.0);
    }
    Ok((n as i64 - best_agreement_by_enumeration(&c)) as f64 / n as f64)
}

fn best_agreement_by_enumeration(c: &[Vec<i64>]) -> i64 {
    fn go(c: &[Vec<i64>], row: usize, used: &mut [bool]) -> i64 {
        if row == c.len() {
            return 0;
        }
        let mut best = i64::MIN;
        for j in 0..c.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(c[row][j] + go(c, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    go(c, 0, &mut vec![false; c.len()])
}

/// Target matrix for [`matrix_errors`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorTarget {
    /// `x̄x̄ᵀ`; two communities only.
    MembershipOuter,
    /// The cluster matrix `Z̄`.
    Cluster,
}

/// `(‖Ẑ − target‖²_F, ‖Ẑ − target‖₁)`.
pub fn matrix_errors<T: Scalar>(
    zhat: &SymmetricMatrix<T>,
    truth: &GroundTruth<T>,
    target: ErrorTarget,
) -> Result<(T, T)> {
    let owned;
    let t = match target {
        ErrorTarget::MembershipOuter => {
            owned = truth.membership_outer()?;
            &owned
        }
        ErrorTarget::Cluster => &truth.cluster,
    };
    if t.dim() != zhat.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: zhat.dim(),
        });
    }
    let d = zhat.as_mat().sub(t.as_mat());
    Ok((frobenius_sq(&d), l1_entrywise(&d)))
}

/// `min_{α = ±1} ‖α x̂ − x̄‖²₂`.
pub fn sign_aligned_error<T: Scalar>(xhat: &[T], xbar: &[T]) -> Result<T> {
    if xhat.len() != xbar.len() {
        return Err(Error::DimensionMismatch {
            expected: xbar.len(),
            found: xhat.len(),
        });
    }
    let plus: T = xhat
        .iter()
        .zip(xbar)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    let minus: T = xhat
        .iter()
        .zip(xbar)
        .map(|(&a, &b)| (a + b) * (a + b))
        .sum();
    Ok(plus.min(minus))
}

/// `‖P̂ − P̄‖²_F`.
pub fn projection_error<T: Scalar>(
    phat: &SymmetricMatrix<T>,
    pbar: &SymmetricMatrix<T>,
) -> Result<T> {
    if phat.dim() != pbar.dim() {
        return Err(Error::DimensionMismatch {
            expected: pbar.dim(),
            found: phat.dim(),
        });
    }
    Ok(frobenius_sq(&phat.as_mat().sub(pbar.as_mat())))
}

/// Everything recovered from one solution, with the metrics that apply to it.
#[derive(Clone, Debug)]
pub struct RecoveryResult {
    /// `√n·v₁`; two-community path.
    pub xhat: Option<Vec<f64>>,
    pub labels: CommunityAssignment,
    /// Spectral projection; K-community path.
    pub phat: Option<SymmetricMatrix<f64>>,
    pub misclassified_fraction: Option<f64>,
    pub frob_sq_error: Option<f64>,
    pub l1_error: Option<f64>,
    pub proj_error: Option<f64>,
    /// `min_α ‖αx̂ − x̄‖²₂`.
    pub xhat_sq_error: Option<f64>,
}

impl RecoveryResult {
    pub const CSV_COLUMNS: [&'static str; 5] = [
        "misclassified_fraction",
        "frob_sq_error",
        "l1_error",
        "proj_error",
        "xhat_sq_error",
    ];

    /// Values in [`Self::CSV_COLUMNS`] order; absent metrics are empty fields.
    pub fn csv_fields(&self) -> Vec<String> {
        [
            self.misclassified_fraction,
            self.frob_sq_error,
            self.l1_error,
            self.proj_error,
            self.xhat_sq_error,
        ]
        .iter()
        .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ground_truth, ModelSpec};

    fn assignment(labels: &[usize]) -> CommunityAssignment {
        CommunityAssignment::from_labels(labels.to_vec()).unwrap()
    }

    #[test]
    fn lambda_by_direct_count() {
        let complete = AdjacencyMatrix::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(estimate_lambda(&complete), 1.0);
        assert_eq!(estimate_lambda(&AdjacencyMatrix::empty(5)), 0.0);
        let two = AdjacencyMatrix::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        // 2·2 / (4·3)
        assert_eq!(estimate_lambda_exact(&two), Ratio::new(1, 3));
        assert_eq!(
            estimate_lambda_exact(&AdjacencyMatrix::empty(1)),
            Ratio::from_integer(0)
        );
    }

    #[test]
    fn cluster_count() {
        assert_eq!(
            lambda_cluster_count(&CommunityAssignment::from_sizes(&[10, 6, 4])),
            152
        );
        let singletons = CommunityAssignment::from_labels((1..=7).collect()).unwrap();
        assert_eq!(lambda_cluster_count(&singletons), 7);
        assert_eq!(
            lambda_cluster_count(&CommunityAssignment::from_sizes(&[9])),
            81
        );
        assert_eq!(
            lambda_cluster_count(&CommunityAssignment::from_sizes(&[5, 5, 5])),
            15 * 5
        );
    }

    #[test]
    fn rank_one_rounding_is_exact() {
        let spec = ModelSpec::classical(8, 0.5, 0.1).unwrap();
        let gt = ground_truth::<f64>(&spec).unwrap();
        let (xhat, labels) = round_leading_eigenvector(&gt.membership_outer().unwrap()).unwrap();
        let xbar = gt.membership().unwrap();
        assert!(sign_aligned_error(&xhat, xbar).unwrap() < 1e-20);
        assert_eq!(misclassification(&labels, &gt.assignment).unwrap(), 0.0);
    }

    #[test]
    fn identity_rounding_is_well_defined() {
        let z = SymmetricMatrix::<f64>::identity(5);
        let a = round_leading_eigenvector(&z).unwrap();
        let b = round_leading_eigenvector(&z).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let norm: f64 = a.0.iter().map(|x| x * x).sum();
        assert!((norm - 5.0).abs() < 1e-12);
    }

    #[test]
    fn projection_recovers_balanced_structure() {
        let spec = ModelSpec::balanced(3, 4, 0.5, 0.1).unwrap();
        let gt = ground_truth::<f64>(&spec).unwrap();
        let zr = gt.projection.scale(4.0 * 3.0 / 2.0);
        let p = spectral_projection(&zr, 3, RankMode::KMinusOne).unwrap();
        assert!(projection_error(&p, &gt.projection).unwrap() < 1e-16);
        let labels = labels_from_projection(&p, 3, 9).unwrap();
        assert_eq!(labels, gt.assignment);
    }

    #[test]
    fn projection_rank_validation() {
        let z = SymmetricMatrix::<f64>::identity(3);
        assert!(spectral_projection(&z, 1, RankMode::KMinusOne).is_err());
        assert!(spectral_projection(&z, 3, RankMode::TwiceKMinusThree).is_err());
        assert_eq!(RankMode::TwiceKMinusThree.rank(2), 1);
        assert_eq!(RankMode::KMinusOne.rank(2), 1);
        assert_eq!(
            "2K-3".parse::<RankMode>().unwrap(),
            RankMode::TwiceKMinusThree
        );
        assert!("k".parse::<RankMode>().is_err());
    }

    #[test]
    fn single_cluster_labels() {
        let p = SymmetricMatrix::<f64>::identity(4);
        assert_eq!(
            labels_from_projection(&p, 1, 0).unwrap().labels(),
            &[1, 1, 1, 1]
        );
    }

    #[test]
    fn misclassification_examples() {
        let t = assignment(&[1, 1, 2, 2]);
        assert_eq!(misclassification(&t, &t).unwrap(), 0.0);
        assert_eq!(
            misclassification(&assignment(&[2, 2, 1, 1]), &t).unwrap(),
            0.0
        );
        assert_eq!(
            misclassification(&assignment(&[1, 2, 2, 2]), &t).unwrap(),
            0.25
        );
        assert_eq!(
            misclassification_by_enumeration(&assignment(&[1, 2, 2, 2]), &t).unwrap(),
            0.25
        );
        // more estimated labels than true ones
        let e = assignment(&[1, 2, 3, 3]);
        assert_eq!(misclassification(&e, &t).unwrap(), 0.25);
        assert!(misclassification(&assignment(&[1, 2]), &t).is_err());
    }

    #[test]
    fn matrix_error_examples() {
        let spec = ModelSpec::classical(6, 0.5, 0.1).unwrap();
        let gt = ground_truth::<f64>(&spec).unwrap();
        let xx = gt.membership_outer().unwrap();
        assert_eq!(
            matrix_errors(&xx, &gt, ErrorTarget::MembershipOuter).unwrap(),
            (0.0, 0.0)
        );
        let mut z = gt.cluster.as_mat().clone();
        z[(0, 4)] += 0.25;
        let z = SymmetricMatrix::from_symmetrized(z);
        // symmetrization splits the bump over (0,4) and (4,0)
        let (f, l) = matrix_errors(&z, &gt, ErrorTarget::Cluster).unwrap();
        assert_eq!(f, 2.0 * 0.125 * 0.125);
        assert_eq!(l, 0.25);
    }

    #[test]
    fn csv_fields_leave_missing_metrics_empty() {
        let r = RecoveryResult {
            xhat: None,
            labels: assignment(&[1, 2]),
            phat: None,
            misclassified_fraction: Some(0.5),
            frob_sq_error: None,
            l1_error: None,
            proj_error: Some(1.25),
            xhat_sq_error: None,
        };
        assert_eq!(r.csv_fields(), vec!["0.5", "", "", "1.25", ""]);
    }
}
