//! Monte-Carlo checks of the concentration and convex-geometry inequalities behind the
//! recovery guarantees.
//!
//! Each audit returns an [`AuditReport`] with one row per trial. A row is a violation when
//! its observed value exceeds its bound. Rows drawn outside an inequality's hypothesis are
//! kept for information but do not count as genuine violations.

use std::io::Write;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cut_norm_exact, cut_norm_lower, l1_entrywise, psd_project, SymmetricMatrix};
use crate::model::{expected_adjacency, ground_truth, model_statistics, sample_graph, ModelSpec};
use crate::recovery::{estimate_lambda, lambda_cluster_count};
use crate::rng;
use crate::solver::{
    project_entrywise, restore_feasibility, solve, DiagMode, FeasibleSet, SolverConfig,
};

/// Upper estimate of the Grothendieck constant.
pub const GROTHENDIECK_CONSTANT: f64 = 1.783;

/// Schema tag written as the first line of every audit CSV.
pub const AUDIT_CSV_VERSION: &str = "# sbm-sdp audit v1";

/// Restarts used by the lower-bound cut norm in [`audit_deviation`].
pub const CUT_NORM_RESTARTS: usize = 16;

/// Largest dimension accepted by [`audit_grothendieck_psd`].
pub const GROTHENDIECK_AUDIT_MAX_DIM: usize = 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub claim_id: String,
    pub trial: usize,
    pub observed: f64,
    pub bound: f64,
    pub hypothesis_ok: bool,
    pub violation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginStats {
    /// Smallest `bound − observed`.
    pub min: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub claim_id: String,
    pub trials: usize,
    /// Rows with `observed > bound`, whether or not the hypothesis held.
    pub violations: usize,
    /// Violations on rows where the hypothesis held.
    pub genuine_violations: usize,
    /// Trials skipped because the solver did not converge.
    pub aborted: usize,
    pub margin: MarginStats,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    fn from_rows(claim_id: &str, trials: usize, aborted: usize, rows: Vec<AuditRow>) -> Self {
        let violations = rows.iter().filter(|r| r.violation).count();
        let genuine_violations = rows
            .iter()
            .filter(|r| r.violation && r.hypothesis_ok)
            .count();
        let margins: Vec<f64> = rows.iter().map(|r| r.bound - r.observed).collect();
        let margin = if margins.is_empty() {
            MarginStats {
                min: f64::NAN,
                mean: f64::NAN,
            }
        } else {
            MarginStats {
                min: margins.iter().copied().fold(f64::INFINITY, f64::min),
                mean: margins.iter().sum::<f64>() / margins.len() as f64,
            }
        };
        Self {
            claim_id: claim_id.to_string(),
            trials,
            violations,
            genuine_violations,
            aborted,
            margin,
            rows,
        }
    }

    /// Version comment, header, one row per trial.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Internal(format!("writing audit CSV: {e}"));
        writeln!(out, "{AUDIT_CSV_VERSION}").map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)
                .map_err(|e| Error::Internal(e.to_string()))?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "claim_id",
                "trial",
                "observed",
                "bound",
                "hypothesis_ok",
                "violation",
            ])
            .map_err(|e| Error::Internal(e.to_string()))?;
        }
        w.flush().map_err(io)
    }
}

/// Parses a CSV written by [`AuditReport::write_csv`].
pub fn read_audit_csv<R: std::io::Read>(input: R) -> Result<Vec<AuditRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(|e| Error::validation(format!("audit CSV: {e}"))))
        .collect()
}

fn row(claim: &str, trial: usize, observed: f64, bound: f64, hypothesis_ok: bool) -> AuditRow {
    AuditRow {
        claim_id: claim.to_string(),
        trial,
        observed,
        bound,
        hypothesis_ok,
        violation: observed > bound,
    }
}

/// A reference objective `R` together with its maximizer `Z_R` over the matching set.
#[derive(Clone, Debug)]
pub struct ReferenceInstance {
    pub r: SymmetricMatrix<f64>,
    pub z_r: SymmetricMatrix<f64>,
    /// `p − q`.
    pub scale: f64,
    pub set: FeasibleSet<f64>,
}

impl ReferenceInstance {
    /// `Z_R = x̄x̄ᵀ`, `R = ((p−q)/2)·Z_R`, over the Grothendieck set.
    pub fn classical(n: usize, p: f64, q: f64) -> Result<Self> {
        let spec = ModelSpec::classical(n, p, q)?;
        let z_r = ground_truth::<f64>(&spec)?.membership_outer()?;
        let r = z_r.scale((p - q) / 2.0);
        Ok(Self {
            r,
            z_r,
            scale: p - q,
            set: FeasibleSet::GrothendieckPsd,
        })
    }

    /// `R = s(p−q)·P̄`, `Z_R = (sK/(K−1))·P̄`, over the K-community set.
    pub fn balanced(k: usize, s: usize, p: f64, q: f64, diag: DiagMode) -> Result<Self> {
        let spec = ModelSpec::balanced(k, s, p, q)?;
        let pbar = ground_truth::<f64>(&spec)?.projection;
        let r = pbar.scale(s as f64 * (p - q));
        let z_r = pbar.scale((s * k) as f64 / (k - 1) as f64);
        Ok(Self {
            r,
            z_r,
            scale: p - q,
            set: FeasibleSet::KCommunity { k, diag },
        })
    }

    /// The instance matching a classical or balanced model.
    pub fn for_spec(spec: &ModelSpec) -> Result<Self> {
        match *spec {
            ModelSpec::Classical { n, p, q } => Self::classical(n, p, q),
            ModelSpec::Balanced { k, s, p, q } => Self::balanced(k, s, p, q, DiagMode::default()),
            ModelSpec::General { .. } => Err(Error::Unsupported(
                "reference instances exist for classical and balanced models".into(),
            )),
        }
    }
}

/// Cut-norm evaluation used by [`audit_deviation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutNormMode {
    /// Exhaustive; `n ≤ 26`.
    Exact,
    /// Local-search lower bound; any `n`.
    Lower,
}

fn deviation_hypothesis(spec: &ModelSpec) -> Result<(f64, bool)> {
    let stats = model_statistics(spec)?;
    Ok((stats.pbar, stats.pbar >= 9.0 / spec.n() as f64))
}

/// `‖A − EA‖∞→1 ≤ 3 p̄^{1/2} n^{3/2}` when `p̄ ≥ 9/n`.
///
/// In `Lower` mode the observed value never exceeds the true norm, so a violation is a
/// genuine counterexample.
pub fn audit_deviation(
    spec: &ModelSpec,
    trials: usize,
    seed: u64,
    mode: CutNormMode,
) -> Result<AuditReport> {
    let n = spec.n();
    if mode == CutNormMode::Exact && n > crate::linalg::CUT_NORM_EXACT_MAX_DIM {
        return Err(Error::TooLarge {
            what: "exact cut norm",
            n,
            max: crate::linalg::CUT_NORM_EXACT_MAX_DIM,
        });
    }
    let (pbar, hyp) = deviation_hypothesis(spec)?;
    let bound = 3.0 * pbar.sqrt() * (n as f64).powf(1.5);
    let ea = expected_adjacency::<f64>(spec)?;
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_seed = rng::child_seed(seed, t as u64);
        let a = sample_graph(spec, trial_seed)?.to_matrix::<f64>();
        let d = a.as_mat().sub(ea.as_mat());
        let observed = match mode {
            CutNormMode::Exact => cut_norm_exact(&d)?,
            CutNormMode::Lower => {
                cut_norm_lower(&d, CUT_NORM_RESTARTS, rng::child_seed(trial_seed, 1))
            }
        };
        rows.push(row("deviation", t, observed, bound, hyp));
    }
    Ok(AuditReport::from_rows("deviation", trials, 0, rows))
}

/// `(2/(n(n−1))) |Σ_{i<j} (a_ij − E a_ij)| ≤ 3 p̄^{1/2} n^{−1/2}` when `p̄ ≥ 9/n`.
pub fn audit_sum_deviation(spec: &ModelSpec, trials: usize, seed: u64) -> Result<AuditReport> {
    let n = spec.n();
    let (pbar, hyp) = deviation_hypothesis(spec)?;
    let bound = 3.0 * pbar.sqrt() / (n as f64).sqrt();
    let pairs = if n < 2 {
        1.0
    } else {
        (n * (n - 1)) as f64 / 2.0
    };
    let mut expected = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            expected += spec.edge_probability(i, j);
        }
    }
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let a = sample_graph(spec, rng::child_seed(seed, t as u64))?;
        let observed = (a.edge_count() as f64 - expected).abs() / pairs;
        rows.push(row("sum_deviation", t, observed, bound, hyp));
    }
    Ok(AuditReport::from_rows("sum_deviation", trials, 0, rows))
}

/// `max_{Z ∈ M_G⁺} |⟨B, Z⟩| ≤ K_G ‖B‖∞→1` on random symmetric `B` with entries uniform on
/// `[−1, 1]`. The observed value is the better of the solutions for `B` and `−B`; the bound
/// is `1.783·‖B‖∞→1` plus that solution's duality gap.
pub fn audit_grothendieck_psd(
    n: usize,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig<f64>,
) -> Result<AuditReport> {
    if n > GROTHENDIECK_AUDIT_MAX_DIM {
        return Err(Error::TooLarge {
            what: "Grothendieck audit",
            n,
            max: GROTHENDIECK_AUDIT_MAX_DIM,
        });
    }
    let set = FeasibleSet::GrothendieckPsd;
    let mut rows = Vec::with_capacity(trials);
    let mut aborted = 0;
    for t in 0..trials {
        let mut rng = rng::stream(seed, t as u64);
        let b = SymmetricMatrix::from_upper_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        let mut best: Option<(f64, f64)> = None;
        let mut ok = true;
        for sign in [1.0, -1.0] {
            let bs = b.scale(sign);
            let sol = solve(&bs, &set, cfg)?;
            if !sol.converged {
                ok = false;
                break;
            }
            let gap = sol.duality_gap(&bs, &set)?;
            if best.is_none_or(|(v, _)| sol.objective > v) {
                best = Some((sol.objective, gap));
            }
        }
        if !ok {
            aborted += 1;
            continue;
        }
        let (v, gap) = best.expect("two solves");
        let cut = cut_norm_exact(b.as_mat())?;
        rows.push(row(
            "grothendieck_psd",
            t,
            v,
            GROTHENDIECK_CONSTANT * cut + gap,
            true,
        ));
    }
    Ok(AuditReport::from_rows(
        "grothendieck_psd",
        trials,
        aborted,
        rows,
    ))
}

/// `⟨R,Z_R⟩ − 2K_G‖B−R‖∞→1 ≤ ⟨R,Ẑ⟩ ≤ ⟨R,Z_R⟩` with `B = A − λ(A)E` sampled from `spec`
/// and `Ẑ` the solution over the instance's set.
///
/// Each row records the shortfall `⟨R,Z_R⟩ − ⟨R,Ẑ⟩` as observed and `2K_G‖B−R‖∞→1 + gap`
/// as bound. The right-hand inequality is checked too: a shortfall below `−10⁻⁸·|⟨R,Z_R⟩|`
/// also marks the row as a violation.
pub fn audit_almost_maximizer(
    instance: &ReferenceInstance,
    spec: &ModelSpec,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig<f64>,
) -> Result<AuditReport> {
    let n = spec.n();
    if instance.r.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: instance.r.dim(),
        });
    }
    if n > crate::linalg::CUT_NORM_EXACT_MAX_DIM {
        return Err(Error::TooLarge {
            what: "exact cut norm",
            n,
            max: crate::linalg::CUT_NORM_EXACT_MAX_DIM,
        });
    }
    let top = instance.r.dot(&instance.z_r);
    let slack = 1e-8 * top.abs().max(1.0);
    let mut rows = Vec::with_capacity(trials);
    let mut aborted = 0;
    for t in 0..trials {
        let a = sample_graph(spec, rng::child_seed(seed, t as u64))?;
        let lambda = estimate_lambda(&a);
        let b = a
            .to_matrix::<f64>()
            .sub(&SymmetricMatrix::ones(n).scale(lambda));
        let sol = solve(&b, &instance.set, cfg)?;
        if !sol.converged {
            aborted += 1;
            continue;
        }
        let gap = sol.duality_gap(&b, &instance.set)?;
        let shortfall = top - instance.r.dot(&sol.z);
        let dist = cut_norm_exact(&b.as_mat().sub(instance.r.as_mat()))?;
        let mut r = row(
            "almost_max",
            t,
            shortfall,
            2.0 * GROTHENDIECK_CONSTANT * dist + gap,
            true,
        );
        r.violation |= shortfall < -slack;
        rows.push(r);
    }
    Ok(AuditReport::from_rows("almost_max", trials, aborted, rows))
}

/// `⟨Ā, Z̄ − Z⟩ ≥ ((p−q)/2)‖Z̄ − Z‖₁` for feasible `Z` with `ΣZ = Σ_k |C_k|²`.
///
/// Trial 0 uses the uninformative point `(λ/n²)E`. Other trials perturb `Z̄` by symmetric
/// Gaussian noise of a random scale in `[0.05, 2]`, project onto the entrywise constraints
/// and the PSD cone, and restore exact feasibility. Observed is the right-hand side, bound
/// the left-hand side; rounding slack of `10⁻¹²·n²` is added to the bound.
pub fn audit_distinguishing(spec: &ModelSpec, trials: usize, seed: u64) -> Result<AuditReport> {
    let ModelSpec::General { .. } = spec else {
        return Err(Error::Unsupported(
            "the distinguishing audit takes a general model".into(),
        ));
    };
    spec.validate()?;
    let n = spec.n();
    let (p, q) = spec.thresholds();
    let abar = expected_adjacency::<f64>(spec)?;
    let zbar = ground_truth::<f64>(spec)?.cluster;
    let lambda = lambda_cluster_count(&spec.assignment()) as f64;
    let set = FeasibleSet::SumConstrained { lambda };
    let slack = 1e-12 * (n * n) as f64;
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let z = if t == 0 {
            SymmetricMatrix::ones(n).scale(lambda / (n * n) as f64)
        } else {
            let mut rng = rng::stream(seed, t as u64);
            let sigma = rng.random_range(0.05..2.0);
            let noise = SymmetricMatrix::from_upper_fn(n, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                sigma * g
            });
            let w = zbar.add(&noise);
            let y = project_entrywise(w.as_mat(), &set)?;
            restore_feasibility(&psd_project(&y)?, &set)?
        };
        let diff = zbar.as_mat().sub(z.as_mat());
        let lhs = abar.as_mat().dot(&diff);
        let rhs = (p - q) / 2.0 * l1_entrywise(&diff);
        rows.push(row("distinguishing", t, rhs, lhs + slack, true));
    }
    Ok(AuditReport::from_rows("distinguishing", trials, 0, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CommunityAssignment;

    #[test]
    fn complete_graph_has_no_deviation() {
        let spec = ModelSpec::classical(10, 1.0, 1.0).unwrap();
        let rep = audit_deviation(&spec, 3, 1, CutNormMode::Exact).unwrap();
        assert!(rep.rows.iter().all(|r| r.observed == 0.0));
        assert_eq!(rep.violations, 0);
        let rep = audit_sum_deviation(&spec, 3, 1).unwrap();
        assert!(rep.rows.iter().all(|r| r.observed == 0.0));
    }

    #[test]
    fn small_exact_run_reports_failed_hypothesis() {
        // p̄ = 1/4 < 9/16
        let spec = ModelSpec::classical(16, 0.5, 0.5).unwrap();
        let rep = audit_deviation(&spec, 2, 3, CutNormMode::Exact).unwrap();
        assert!(rep.rows.iter().all(|r| !r.hypothesis_ok));
        assert_eq!(rep.genuine_violations, 0);
        assert!(audit_deviation(
            &ModelSpec::classical(28, 0.5, 0.5).unwrap(),
            1,
            0,
            CutNormMode::Exact
        )
        .is_err());
    }

    #[test]
    fn reference_instances_satisfy_their_identities() {
        let c = ReferenceInstance::classical(6, 0.7, 0.3).unwrap();
        assert!(c.r.as_mat().sub(&c.z_r.as_mat().scale(0.2)).max_abs() < 1e-15);
        let b = ReferenceInstance::balanced(3, 4, 0.5, 0.1, DiagMode::Inequality).unwrap();
        // Z_R = (K/((K−1)(p−q)))·R
        let ratio = 3.0 / (2.0 * 0.4);
        assert!(b.z_r.as_mat().sub(&b.r.as_mat().scale(ratio)).max_abs() < 1e-12);
        // the cluster diagonal of Z_R is sK/(K−1) · (K−1)/n = 1
        assert!((b.z_r[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distinguishing_at_truth_and_uninformative_point() {
        let a = CommunityAssignment::from_sizes(&[6, 4, 2]);
        let spec = ModelSpec::general_two_level(a, 0.8, 0.2).unwrap();
        let rep = audit_distinguishing(&spec, 4, 5).unwrap();
        assert_eq!(rep.violations, 0);
        // closed form at (λ/n²)E, λ = 56, n = 12: within pairs (incl. diagonal) 56, across 88.
        // ‖Z̄ − Z‖₁ = 56(1 − c) + 88c with c = 56/144.
        let c = 56.0 / 144.0;
        let l1 = 56.0 * (1.0 - c) + 88.0 * c;
        assert!((rep.rows[0].observed - 0.3 * l1).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let spec = ModelSpec::classical(8, 0.6, 0.2).unwrap();
        let rep = audit_sum_deviation(&spec, 4, 2).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(AUDIT_CSV_VERSION));
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("claim_id,trial,observed,bound,hypothesis_ok,violation"));
        assert_eq!(read_audit_csv(buf.as_slice()).unwrap(), rep.rows);
    }
}
