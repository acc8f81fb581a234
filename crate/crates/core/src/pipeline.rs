//! Graph in, community estimate and metrics out: builds the objective for one of the three
//! SDP formulations, solves it and rounds the solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::model::{AdjacencyMatrix, CommunityAssignment, GroundTruth};
use crate::recovery::{
    estimate_lambda, labels_from_projection, lambda_cluster_count, matrix_errors,
    misclassification, projection_error, round_leading_eigenvector, sign_aligned_error,
    spectral_projection, top_projection, ErrorTarget, RankMode, RecoveryResult,
};
use crate::solver::{solve, DiagMode, FeasibleSet, SdpSolution, SolverConfig};

/// Which semidefinite program to solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdpVariant {
    /// `max ⟨A − λE, Z⟩` over `{Z ⪰ 0, diag Z ≤ 1}`, λ the edge density; two communities.
    #[default]
    Eq5,
    /// `max ⟨A, Z⟩` over `{Z ⪰ 0, Z ≥ 0, diag Z ≤ 1, ΣZ = λ}`, λ = `Σ|C_k|²`.
    Eq8,
    /// `max ⟨A − λE, Z⟩` over `{Z ⪰ 0, diag Z ≤ 1, Z ≥ −1/(K−1)}`.
    Eq24,
}

impl std::str::FromStr for SdpVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eq5" => Ok(SdpVariant::Eq5),
            "eq8" => Ok(SdpVariant::Eq8),
            "eq24" => Ok(SdpVariant::Eq24),
            other => Err(Error::validation(format!(
                "unknown SDP '{other}' (expected eq5, eq8 or eq24)"
            ))),
        }
    }
}

impl std::fmt::Display for SdpVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpVariant::Eq5 => "eq5",
            SdpVariant::Eq8 => "eq8",
            SdpVariant::Eq24 => "eq24",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    pub sdp: SdpVariant,
    /// Number of communities; taken from the ground truth when absent.
    pub k: Option<usize>,
    /// Replaces `Σ|C_k|²` in the sum constraint of `Eq8`.
    pub lambda_override: Option<f64>,
    pub rank_mode: RankMode,
    pub diag_mode: DiagMode,
    pub solver: SolverConfig<f64>,
    /// Seed for k-means label extraction.
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            sdp: SdpVariant::Eq5,
            k: None,
            lambda_override: None,
            rank_mode: RankMode::default(),
            diag_mode: DiagMode::default(),
            solver: SolverConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    /// λ used in the objective (`Eq5`, `Eq24`) or the sum constraint (`Eq8`).
    pub lambda: f64,
    pub k: usize,
    pub solution: SdpSolution<f64>,
    /// `None` when no certificate could be formed.
    pub duality_gap: Option<f64>,
    pub recovery: RecoveryResult,
}

pub const PIPELINE_CSV_VERSION: &str = "# sbm-sdp pipeline v1";

/// Flat, CSV-friendly view of a [`PipelineOutcome`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineRecord {
    pub sdp: SdpVariant,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub duality_gap: Option<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `ΣẐ_ij`.
    pub z_sum: f64,
    pub misclassified_fraction: Option<f64>,
    pub frob_sq_error: Option<f64>,
    pub l1_error: Option<f64>,
    pub proj_error: Option<f64>,
    pub xhat_sq_error: Option<f64>,
}

impl PipelineRecord {
    pub fn new(out: &PipelineOutcome, params: &PipelineParams) -> Self {
        let s = &out.solution;
        let r = &out.recovery;
        Self {
            sdp: params.sdp,
            n: s.z.dim(),
            k: out.k,
            seed: params.seed,
            lambda: out.lambda,
            converged: s.converged,
            iterations: s.iterations,
            objective: s.objective,
            duality_gap: out.duality_gap,
            primal_residual: s.primal_residual,
            dual_residual: s.dual_residual,
            z_sum: s.z.as_mat().sum(),
            misclassified_fraction: r.misclassified_fraction,
            frob_sq_error: r.frob_sq_error,
            l1_error: r.l1_error,
            proj_error: r.proj_error,
            xhat_sq_error: r.xhat_sq_error,
        }
    }
}

/// Runs one SDP on `a` and rounds the result. With `truth`, every metric that applies to
/// the chosen formulation is filled in.
pub fn run_pipeline(
    a: &AdjacencyMatrix,
    truth: Option<&CommunityAssignment>,
    params: &PipelineParams,
) -> Result<PipelineOutcome> {
    let n = a.n();
    if let Some(t) = truth {
        if t.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.len(),
            });
        }
    }
    let k = match (params.k, truth) {
        (Some(k), _) => k,
        (None, Some(t)) => t.k(),
        (None, None) if params.sdp == SdpVariant::Eq5 => 2,
        (None, None) => {
            return Err(Error::validation(
                "the number of communities is needed without ground truth",
            ))
        }
    };
    if params.sdp == SdpVariant::Eq5 && k != 2 {
        return Err(Error::validation(format!(
            "eq5 recovers two communities, got K = {k}"
        )));
    }
    if params.sdp == SdpVariant::Eq24 && k < 2 {
        return Err(Error::validation(format!("eq24 needs K >= 2, got {k}")));
    }
    let adjacency = a.to_matrix::<f64>();
    let (lambda, b, set) = match params.sdp {
        SdpVariant::Eq5 | SdpVariant::Eq24 => {
            let lambda = estimate_lambda(a);
            let b = adjacency.sub(&SymmetricMatrix::ones(n).scale(lambda));
            let set = if params.sdp == SdpVariant::Eq5 {
                FeasibleSet::GrothendieckPsd
            } else {
                FeasibleSet::KCommunity {
                    k,
                    diag: params.diag_mode,
                }
            };
            (lambda, b, set)
        }
        SdpVariant::Eq8 => {
            let lambda = match (params.lambda_override, truth) {
                (Some(l), _) => l,
                (None, Some(t)) => lambda_cluster_count(t) as f64,
                (None, None) => {
                    return Err(Error::validation(
                        "eq8 needs a lambda override when no ground truth is given",
                    ))
                }
            };
            (lambda, adjacency, FeasibleSet::SumConstrained { lambda })
        }
    };
    let solution = solve(&b, &set, &params.solver)?;
    let duality_gap = solution.duality_gap(&b, &set).ok();
    let z = &solution.z;
    let gt = truth.map(GroundTruth::<f64>::from_assignment);

    let mut rec = RecoveryResult {
        xhat: None,
        labels: CommunityAssignment::new(vec![1; n], 1)?,
        phat: None,
        misclassified_fraction: None,
        frob_sq_error: None,
        l1_error: None,
        proj_error: None,
        xhat_sq_error: None,
    };
    match params.sdp {
        SdpVariant::Eq5 => {
            let (xhat, labels) = round_leading_eigenvector(z)?;
            if let Some(gt) = gt.as_ref().filter(|g| g.assignment.k() == 2) {
                rec.xhat_sq_error = Some(sign_aligned_error(&xhat, gt.membership()?)?);
                let (f, l) = matrix_errors(z, gt, ErrorTarget::MembershipOuter)?;
                rec.frob_sq_error = Some(f);
                rec.l1_error = Some(l);
            }
            rec.xhat = Some(xhat);
            rec.labels = labels;
        }
        SdpVariant::Eq8 => {
            if k >= 2 && k < n {
                let p = top_projection(z, k)?;
                rec.labels = labels_from_projection(&p, k, params.seed)?;
            } else if k >= n {
                rec.labels = CommunityAssignment::from_labels((1..=n).collect())?;
            }
            if let Some(gt) = &gt {
                let (f, l) = matrix_errors(z, gt, ErrorTarget::Cluster)?;
                rec.frob_sq_error = Some(f);
                rec.l1_error = Some(l);
            }
        }
        SdpVariant::Eq24 => {
            let p = spectral_projection(z, k, params.rank_mode)?;
            rec.labels = labels_from_projection(&p, k, params.seed)?;
            if let Some(gt) = &gt {
                rec.proj_error = Some(projection_error(&p, &gt.projection)?);
            }
            rec.phat = Some(p);
        }
    }
    if let Some(t) = truth {
        rec.misclassified_fraction = Some(misclassification(&rec.labels, t)?);
    }
    Ok(PipelineOutcome {
        lambda,
        k,
        solution,
        duality_gap,
        recovery: rec,
    })
}
