//! First-order solver for `maximize ⟨B, Z⟩` over PSD matrices with entrywise / affine side
//! constraints.
//!
//! The problem is split into a PSD block `X` and an entrywise block `Y` tied by `X = Y`,
//! and solved with over-relaxed ADMM in scaled form:
//!
//! ```text
//! X⁺  = Π_psd(Y − U)
//! X̂   = α X⁺ + (1 − α) Y
//! Y⁺  = Π_C(X̂ + U + B̃/ρ)
//! U⁺  = U + X̂ − Y⁺
//! ```
//!
//! `B̃ = B / ‖B‖_rms` is the objective normalized to unit root-mean-square entry, so the
//! iterates (and therefore the returned `Z`) are invariant under positive rescaling of `B`.
//! `Π_C` is exact for every supported set (see [`project_entrywise`]) and the PSD projection
//! is a full eigendecomposition. At termination the PSD block is moved into the feasible set
//! by [`restore_feasibility`], so the returned `Z` is feasible up to rounding whether or not
//! the iteration converged.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{eigh, psd_project, Mat, SymmetricMatrix};
use crate::scalar::Scalar;

/// How the diagonal is constrained in [`FeasibleSet::KCommunity`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagMode {
    /// `diag(Z) ≤ 1`.
    #[default]
    Inequality,
    /// `diag(Z) = 1`.
    Equality,
}

/// Feasible sets; every variant also carries the implicit `Z ⪰ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeasibleSet<T> {
    /// `{Z ⪰ 0, diag(Z) ≤ 1}`.
    GrothendieckPsd,
    /// `{Z ⪰ 0, Z ≥ 0, diag(Z) ≤ 1, Σ Z_ij = λ}`.
    SumConstrained { lambda: T },
    /// `{Z ⪰ 0, diag constraint, min Z_ij ≥ −1/(K−1)}`.
    KCommunity { k: usize, diag: DiagMode },
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            FeasibleSet::GrothendieckPsd => Ok(()),
            FeasibleSet::SumConstrained { lambda } => {
                let max = T::from_usize_lossy(n * n);
                if !(lambda > T::zero() && lambda <= max) {
                    return Err(Error::validation(format!(
                        "lambda = {lambda} must lie in (0, n^2] = (0, {max}]"
                    )));
                }
                Ok(())
            }
            FeasibleSet::KCommunity { k, .. } => {
                if k < 2 {
                    return Err(Error::validation(format!(
                        "K-community set needs K >= 2, got {k}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Entry lower bound of the K-community set, `−1/(K−1)`.
    fn k_floor(k: usize) -> T {
        -T::one() / T::from_usize_lossy(k - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Initial ADMM penalty, relative to the normalized objective.
    pub rho: T,
    pub max_iterations: usize,
    pub tol_primal: T,
    pub tol_dual: T,
    /// Over-relaxation factor in `[1, 1.9]`.
    pub alpha: T,
    /// Rebalance `ρ` every this many iterations when one residual dominates the other by
    /// more than a factor 10; `0` keeps `ρ` fixed.
    pub adapt_interval: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            rho: T::one(),
            max_iterations: 5000,
            tol_primal: T::lit(1e-6),
            tol_dual: T::lit(1e-6),
            alpha: T::lit(1.6),
            adapt_interval: 50,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > T::zero()) {
            return Err(Error::validation("rho must be positive"));
        }
        if !(self.tol_primal > T::zero() && self.tol_dual > T::zero()) {
            return Err(Error::validation("tolerances must be positive"));
        }
        if !(self.alpha >= T::one() && self.alpha <= T::lit(1.9)) {
            return Err(Error::validation(format!(
                "over-relaxation {} outside [1, 1.9]",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol_primal = tol;
        self.tol_dual = tol;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub z: SymmetricMatrix<T>,
    /// `⟨B, Z⟩` in the caller's units.
    pub objective: T,
    /// `‖X − Y‖_F / n` at termination.
    pub primal_residual: T,
    /// `ρ ‖Y⁺ − Y‖_F / n` at termination (normalized objective units).
    pub dual_residual: T,
    pub iterations: usize,
    pub converged: bool,
    /// PSD multiplier of the consensus constraint, in the caller's units.
    pub dual: SymmetricMatrix<T>,
}

impl<T: Scalar> SdpSolution<T> {
    /// Upper bound on `max_{Z ∈ set} ⟨B, Z⟩ − ⟨B, self.z⟩`; see [`duality_gap_certificate`].
    pub fn duality_gap(&self, b: &SymmetricMatrix<T>, set: &FeasibleSet<T>) -> Result<T> {
        duality_gap_certificate(b, set, &self.z, &self.dual)
    }

    /// The weak-duality upper bound on the optimal value carried by the final multiplier.
    pub fn dual_bound(&self, b: &SymmetricMatrix<T>, set: &FeasibleSet<T>) -> T {
        dual_upper_bound(b, set, &self.dual)
    }
}

/// Solves without tracing.
pub fn solve<T: Scalar>(
    b: &SymmetricMatrix<T>,
    set: &FeasibleSet<T>,
    cfg: &SolverConfig<T>,
) -> Result<SdpSolution<T>> {
    solve_traced(b, set, cfg, None)
}

/// Solves, writing `iteration,objective,primal_residual,dual_residual,rho` CSV rows
/// (with a header) to `trace` when one is given.
pub fn solve_traced<T: Scalar>(
    b: &SymmetricMatrix<T>,
    set: &FeasibleSet<T>,
    cfg: &SolverConfig<T>,
    mut trace: Option<&mut dyn Write>,
) -> Result<SdpSolution<T>> {
    let n = b.dim();
    set.validate(n)?;
    cfg.validate()?;
    if let Some((i, j)) = b.as_mat().first_non_finite() {
        return Err(Error::NonFinite(i, j));
    }
    let trace_io = |e: std::io::Error| Error::Internal(format!("trace sink: {e}"));
    if let Some(t) = trace.as_deref_mut() {
        writeln!(t, "iteration,objective,primal_residual,dual_residual,rho").map_err(trace_io)?;
    }

    let nf = T::from_usize_lossy(n.max(1));
    let warm = match *set {
        FeasibleSet::SumConstrained { lambda } => Mat::filled(n, n, lambda / (nf * nf)),
        _ => Mat::zeros(n, n),
    };
    let scale = (crate::linalg::frobenius_sq(b.as_mat())).sqrt() / nf;
    if n == 0 || scale == T::zero() {
        return Ok(SdpSolution {
            z: restore_feasibility(&SymmetricMatrix::from_symmetrized(warm), set)?,
            objective: T::zero(),
            primal_residual: T::zero(),
            dual_residual: T::zero(),
            iterations: 0,
            converged: true,
            dual: SymmetricMatrix::zeros(n),
        });
    }
    let b_norm = b.as_mat().scale(T::one() / scale);

    let alpha = cfg.alpha;
    let mut rho = cfg.rho;
    let mut y = warm;
    let mut x = y.clone();
    let mut u = Mat::zeros(n, n);
    let mut primal = T::infinity();
    let mut dual = T::infinity();
    let mut iterations = 0;
    let mut converged = false;
    let ten = T::lit(10.0);
    let two = T::lit(2.0);

    while iterations < cfg.max_iterations {
        iterations += 1;
        let v = SymmetricMatrix::from_symmetrized(y.sub(&u));
        x = psd_project(&v)?.into_mat();

        let mut x_hat = x.scale(alpha);
        x_hat.axpy(T::one() - alpha, &y);
        let mut w = x_hat.add(&u);
        w.axpy(T::one() / rho, &b_norm);
        let y_next = project_entrywise(&w, set)?.into_mat();

        u.axpy(T::one(), &x_hat);
        u.axpy(-T::one(), &y_next);

        primal = frob_dist(&x, &y_next) / nf;
        dual = rho * frob_dist(&y_next, &y) / nf;
        y = y_next;

        if let Some(t) = trace.as_deref_mut() {
            let obj = b.as_mat().dot(&y);
            writeln!(t, "{iterations},{obj:e},{primal:e},{dual:e},{rho:e}").map_err(trace_io)?;
        }
        if primal <= cfg.tol_primal && dual <= cfg.tol_dual {
            converged = true;
            break;
        }
        if cfg.adapt_interval > 0 && iterations % cfg.adapt_interval == 0 {
            if primal > ten * dual {
                rho = rho * two;
                u = u.scale(T::one() / two);
            } else if dual > ten * primal {
                rho = rho / two;
                u = u.scale(two);
            }
        }
    }

    let z = restore_feasibility(&SymmetricMatrix::from_symmetrized(x), set)?;
    let objective = b.dot(&z);
    let multiplier = SymmetricMatrix::from_symmetrized(u.scale(rho * scale));
    let dual_psd = psd_project(&multiplier)?;
    Ok(SdpSolution {
        z,
        objective,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        converged,
        dual: dual_psd,
    })
}

fn frob_dist<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> T {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Euclidean projection of the symmetric part of `w` onto the entrywise / affine
/// constraints of `set` (everything except `Z ⪰ 0`).
///
/// * `GrothendieckPsd`: diagonal clamped to `≤ 1`, off-diagonal untouched.
/// * `SumConstrained`: `clamp(W − μ, 0, 1)` with the scalar shift `μ` chosen so the entries
///   sum to `λ`. The sum is nonincreasing in `μ`; `μ` is bracketed, bisected, and then
///   solved exactly on the final set of unclamped entries.
/// * `KCommunity`: entries clamped to `≥ −1/(K−1)`; diagonal clamped to `≤ 1` or set to `1`.
pub fn project_entrywise<T: Scalar>(
    w: &Mat<T>,
    set: &FeasibleSet<T>,
) -> Result<SymmetricMatrix<T>> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch {
            expected: w.rows(),
            found: w.cols(),
        });
    }
    let n = w.rows();
    set.validate(n)?;
    let mut z = SymmetricMatrix::from_symmetrized(w.clone()).into_mat();
    match *set {
        FeasibleSet::GrothendieckPsd => {
            for i in 0..n {
                z[(i, i)] = z[(i, i)].min(T::one());
            }
        }
        FeasibleSet::KCommunity { k, diag } => {
            let floor = FeasibleSet::<T>::k_floor(k);
            for x in z.as_mut_slice() {
                *x = x.max(floor);
            }
            for i in 0..n {
                z[(i, i)] = match diag {
                    DiagMode::Inequality => z[(i, i)].min(T::one()),
                    DiagMode::Equality => T::one(),
                };
            }
        }
        FeasibleSet::SumConstrained { lambda } => {
            let mu = box_sum_shift(z.as_slice(), lambda)?;
            for x in z.as_mut_slice() {
                *x = (*x - mu).max(T::zero()).min(T::one());
            }
        }
    }
    Ok(SymmetricMatrix::from_symmetrized(z))
}

/// Maps a PSD matrix `x` into `set` with a congruence and a convex combination, both of
/// which preserve `⪰ 0`.
///
/// * Diagonal: rows with `x_ii > 1` are rescaled by `1/√x_ii` (for `diag = 1`, every row
///   is rescaled to unit diagonal; a zero row gets a unit diagonal entry).
/// * `KCommunity`: mixed with `I` just enough to lift the smallest entry to `−1/(K−1)`.
/// * `SumConstrained`: replaced by `αX + (1 − α·ΣX/λ)·(λ/n²)E` with the largest `α ∈ [0, 1]`
///   keeping entries nonnegative, the diagonal `≤ 1` and the second weight nonnegative.
///   The sum is `λ` for every `α`.
///
/// A point already in the set is returned unchanged, so the map moves a converged iterate
/// by at most the order of its residual.
pub fn restore_feasibility<T: Scalar>(
    x: &SymmetricMatrix<T>,
    set: &FeasibleSet<T>,
) -> Result<SymmetricMatrix<T>> {
    let n = x.dim();
    set.validate(n)?;
    let mut z = x.as_mat().clone();
    let scale_diag = |z: &mut Mat<T>, unit: bool| {
        let f: Vec<T> = (0..n)
            .map(|i| {
                let d = z[(i, i)];
                if d > T::one() || (unit && d > T::zero()) {
                    T::one() / d.sqrt()
                } else {
                    T::one()
                }
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                z[(i, j)] *= f[i] * f[j];
            }
        }
        if unit {
            for i in 0..n {
                if z[(i, i)] <= T::zero() {
                    for j in 0..n {
                        z[(i, j)] = T::zero();
                        z[(j, i)] = T::zero();
                    }
                }
                z[(i, i)] = T::one();
            }
        }
    };
    match *set {
        FeasibleSet::GrothendieckPsd => scale_diag(&mut z, false),
        FeasibleSet::KCommunity { k, diag } => {
            scale_diag(&mut z, diag == DiagMode::Equality);
            let floor = FeasibleSet::<T>::k_floor(k);
            let min = z.as_slice().iter().copied().fold(T::infinity(), T::min);
            if min < floor {
                let t = T::one() - floor / min;
                z = z.scale(T::one() - t);
                for i in 0..n {
                    z[(i, i)] += t;
                }
                // Rounding in the mix can leave the minimum an ulp below the floor.
                for v in z.as_mut_slice() {
                    *v = v.max(floor);
                }
            }
        }
        FeasibleSet::SumConstrained { lambda } => {
            let nf = T::from_usize_lossy(n);
            let c = lambda / (nf * nf);
            let s = z.sum();
            let mut alpha = T::one();
            if s > lambda {
                alpha = lambda / s;
            }
            // α·(x_ij − s/n²) + c ≥ 0 and α·(x_ii − s/n²) + c ≤ 1.
            let mean = s / (nf * nf);
            for i in 0..n {
                for j in 0..n {
                    let d = z[(i, j)] - mean;
                    if d < T::zero() {
                        alpha = alpha.min(c / -d);
                    }
                    if i == j && d > T::zero() {
                        alpha = alpha.min((T::one() - c) / d);
                    }
                }
            }
            let alpha = alpha.max(T::zero());
            let beta = (T::one() - alpha * s / lambda).max(T::zero());
            z = z.map(|v| (alpha * v + beta * c).max(T::zero()).min(T::one()));
            for i in 0..n {
                z[(i, i)] = z[(i, i)].min(T::one());
            }
        }
    }
    Ok(SymmetricMatrix::from_symmetrized(z))
}

/// Shift `μ` with `Σ clamp(v − μ, 0, 1) = λ`.
fn box_sum_shift<T: Scalar>(v: &[T], lambda: T) -> Result<T> {
    let clamped_sum = |mu: T| -> T {
        v.iter()
            .map(|&x| (x - mu).max(T::zero()).min(T::one()))
            .sum()
    };
    let count = T::from_usize_lossy(v.len());
    let (lo0, hi0) = v
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    // At μ = min − 1 every entry clamps to 1 (sum = count ≥ λ); at μ = max every entry is 0.
    let mut lo = lo0 - T::one();
    let mut hi = hi0;
    if !(clamped_sum(lo) >= lambda && clamped_sum(hi) <= lambda) {
        return Err(Error::Internal(format!(
            "box-sum shift not bracketed for lambda = {lambda}"
        )));
    }
    if lambda >= count {
        return Ok(lo);
    }
    let tol = T::lit(1e-12) * count;
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        let s = clamped_sum(mid);
        if (s - lambda).abs() <= tol || mid == lo || mid == hi {
            lo = mid;
            hi = mid;
            break;
        }
        if s > lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // On the final active pattern the sum is affine in μ; solve it exactly.
    let mu = (lo + hi) / T::lit(2.0);
    let mut ones = T::zero();
    let mut free_sum = T::zero();
    let mut free = 0usize;
    for &x in v {
        let t = x - mu;
        if t >= T::one() {
            ones += T::one();
        } else if t > T::zero() {
            free_sum += x;
            free += 1;
        }
    }
    if free == 0 {
        return Ok(mu);
    }
    let exact = (free_sum - (lambda - ones)) / T::from_usize_lossy(free);
    // Accept the refinement only if it keeps the active pattern consistent.
    let consistent = v.iter().all(|&x| {
        let (a, b) = (x - mu, x - exact);
        (a >= T::one()) == (b >= T::one()) && (a > T::zero()) == (b > T::zero())
    });
    Ok(if consistent { exact } else { mu })
}

/// Feasibility tolerances used by [`check_feasibility`] and [`duality_gap_certificate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityTolerance<T> {
    /// Allowed negative eigenvalue, multiplied by `n`.
    pub eig_per_n: T,
    /// Allowed entrywise violation.
    pub entry: T,
    /// Allowed `|ΣZ − λ|`, multiplied by `n²`.
    pub sum_per_n2: T,
}

impl<T: Scalar> Default for FeasibilityTolerance<T> {
    fn default() -> Self {
        Self {
            eig_per_n: T::lit(1e-6),
            entry: T::lit(1e-6),
            sum_per_n2: T::lit(1e-6),
        }
    }
}

/// Measured constraint violations of a candidate point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feasibility<T> {
    pub min_eigenvalue: T,
    /// Largest violation of the entrywise constraints (0 when satisfied).
    pub entry_violation: T,
    /// `|ΣZ − λ|` for the sum-constrained set, 0 otherwise.
    pub sum_violation: T,
}

impl<T: Scalar> Feasibility<T> {
    pub fn within(&self, n: usize, tol: &FeasibilityTolerance<T>) -> bool {
        let nf = T::from_usize_lossy(n);
        self.min_eigenvalue >= -tol.eig_per_n * nf
            && self.entry_violation <= tol.entry
            && self.sum_violation <= tol.sum_per_n2 * nf * nf
    }
}

pub fn check_feasibility<T: Scalar>(
    z: &SymmetricMatrix<T>,
    set: &FeasibleSet<T>,
) -> Result<Feasibility<T>> {
    let n = z.dim();
    set.validate(n)?;
    let eig = eigh(z)?;
    let min_eigenvalue = eig.eigenvalues().last().copied().unwrap_or(T::zero());
    let m = z.as_mat();
    let mut entry = T::zero();
    let mut sum_violation = T::zero();
    let over_one = |x: T| (x - T::one()).max(T::zero());
    match *set {
        FeasibleSet::GrothendieckPsd => {
            for i in 0..n {
                entry = entry.max(over_one(m[(i, i)]));
            }
        }
        FeasibleSet::SumConstrained { lambda } => {
            for &x in m.as_slice() {
                entry = entry.max((-x).max(T::zero()));
            }
            for i in 0..n {
                entry = entry.max(over_one(m[(i, i)]));
            }
            sum_violation = (m.sum() - lambda).abs();
        }
        FeasibleSet::KCommunity { k, diag } => {
            let floor = FeasibleSet::<T>::k_floor(k);
            for &x in m.as_slice() {
                entry = entry.max((floor - x).max(T::zero()));
            }
            for i in 0..n {
                let d = m[(i, i)];
                entry = entry.max(match diag {
                    DiagMode::Inequality => over_one(d),
                    DiagMode::Equality => (d - T::one()).abs(),
                });
            }
        }
    }
    Ok(Feasibility {
        min_eigenvalue,
        entry_violation: entry,
        sum_violation,
    })
}

/// Weak-duality bound `σ(B + W)` for a PSD multiplier `W`, where `σ` is the support
/// function of a bounded box containing the feasible set.
///
/// For `Z` feasible, `⟨W, Z⟩ ≥ 0`, so `⟨B, Z⟩ ≤ ⟨B + W, Z⟩ ≤ σ(B + W)`. The boxes use the
/// entry bounds implied by `Z ⪰ 0` with `diag(Z) ≤ 1`, namely `|Z_ij| ≤ 1` and `Z_ii ≥ 0`.
fn dual_upper_bound<T: Scalar>(
    b: &SymmetricMatrix<T>,
    set: &FeasibleSet<T>,
    w: &SymmetricMatrix<T>,
) -> T {
    let n = b.dim();
    let m = b.as_mat().add(w.as_mat());
    let pos = |x: T| x.max(T::zero());
    match *set {
        FeasibleSet::GrothendieckPsd => {
            let mut s = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let x = m[(i, j)];
                    s += if i == j { pos(x) } else { x.abs() };
                }
            }
            s
        }
        FeasibleSet::KCommunity { k, diag } => {
            let floor = FeasibleSet::<T>::k_floor(k);
            let mut s = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let x = m[(i, j)];
                    s += if i == j {
                        match diag {
                            DiagMode::Inequality => pos(x),
                            DiagMode::Equality => x,
                        }
                    } else if x > T::zero() {
                        x
                    } else {
                        x * floor
                    };
                }
            }
            s
        }
        FeasibleSet::SumConstrained { lambda } => {
            // Maximum of ⟨M, Z⟩ over {0 ≤ Z ≤ 1, ΣZ = λ}: the λ largest entries, the last
            // one fractionally.
            let mut v = m.into_vec();
            v.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
            let mut remaining = lambda;
            let mut s = T::zero();
            for x in v {
                if remaining <= T::zero() {
                    break;
                }
                let take = remaining.min(T::one());
                s += take * x;
                remaining -= take;
            }
            s
        }
    }
}

/// Upper bound on the suboptimality `max_{Z' ∈ set} ⟨B, Z'⟩ − ⟨B, Z⟩` built from a PSD
/// multiplier `dual` (for instance [`SdpSolution::dual`]).
///
/// Errors if `z` violates the set by more than [`FeasibilityTolerance::default`] or if
/// `dual` is not PSD to working precision.
pub fn duality_gap_certificate<T: Scalar>(
    b: &SymmetricMatrix<T>,
    set: &FeasibleSet<T>,
    z: &SymmetricMatrix<T>,
    dual: &SymmetricMatrix<T>,
) -> Result<T> {
    let n = b.dim();
    if z.dim() != n || dual.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.dim().min(dual.dim()),
        });
    }
    let feas = check_feasibility(z, set)?;
    if !feas.within(n, &FeasibilityTolerance::default()) {
        return Err(Error::Infeasible(format!(
            "min eigenvalue {:e}, entry violation {:e}, sum violation {:e}",
            feas.min_eigenvalue, feas.entry_violation, feas.sum_violation
        )));
    }
    let dual_min = eigh(dual)?
        .eigenvalues()
        .last()
        .copied()
        .unwrap_or(T::zero());
    let dual_tol = T::lit(1e3)
        * T::epsilon()
        * T::one().max(dual.as_mat().max_abs())
        * T::from_usize_lossy(n.max(1));
    if dual_min < -dual_tol {
        return Err(Error::validation(format!(
            "dual multiplier is not PSD (min eigenvalue {dual_min:e})"
        )));
    }
    let upper = dual_upper_bound(b, set, dual);
    // `z` may sit outside the set by the rounding tolerance above, which can push its value
    // a hair past the bound; the suboptimality of such a point is then bounded by zero.
    Ok((upper - b.dot(z)).max(T::zero()))
}
