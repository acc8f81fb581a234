//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by implicit QL iteration with
//! Wilkinson-style shifts (the EISPACK `tred2`/`tql2` pair). The orthogonal factor is kept
//! transposed, so row `k` of the work matrix is the `k`-th eigenvector and every Givens
//! rotation touches two contiguous rows.
//!
//! [`psd_project`] runs QL without rotating vectors and recovers only the eigenvectors it
//! needs by inverse iteration on the tridiagonal matrix.

use crate::error::{Error, Result};
use crate::linalg::mat::{Mat, SymmetricMatrix};
use crate::scalar::Scalar;

/// Eigenvalues in nonincreasing order with matching orthonormal eigenvectors.
///
/// Ties are ordered by the position the QL iteration produced them in (a stable sort), and
/// each eigenvector is signed so its largest-magnitude entry is positive. Entries within a
/// relative `sqrt(ε)` of the largest magnitude count as tied and the first of them wins.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    values: Vec<T>,
    /// Row `k` is the unit eigenvector for `values[k]`.
    vectors_t: Mat<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    /// Unit eigenvector belonging to `eigenvalues()[k]`.
    pub fn eigenvector(&self, k: usize) -> &[T] {
        self.vectors_t.row(k)
    }

    /// Orthogonal matrix whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> Mat<T> {
        self.vectors_t.transpose()
    }

    /// `V diag(f(λ)) Vᵀ`, summing only the terms where `f(λ) != 0`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Mat<T> {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w != T::zero() {
                add_rank_one(&mut out, w, self.vectors_t.row(k));
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Mat<T> {
        self.reconstruct_with(|x| x)
    }

    /// Projection `V_r V_rᵀ` onto the span of the top `r` eigenvectors.
    pub fn top_projection(&self, r: usize) -> Mat<T> {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for k in 0..r.min(n) {
            add_rank_one(&mut out, T::one(), self.vectors_t.row(k));
        }
        out
    }
}

/// `out += w · v vᵀ`.
pub(crate) fn add_rank_one<T: Scalar>(out: &mut Mat<T>, w: T, v: &[T]) {
    let n = v.len();
    for i in 0..n {
        let wi = w * v[i];
        if wi == T::zero() {
            continue;
        }
        for (o, &vj) in out.row_mut(i).iter_mut().zip(v) {
            *o += wi * vj;
        }
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn eigh<T: Scalar>(m: &SymmetricMatrix<T>) -> Result<EigenDecomposition<T>> {
    if let Some((i, j)) = m.as_mat().first_non_finite() {
        return Err(Error::NonFinite(i, j));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors_t: Mat::zeros(0, 0),
        });
    }
    let mut w = m.as_mat().clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut w, &mut d, &mut e);
    ql_implicit(Some(&mut w), &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors_t = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let row = w.row(src);
        let peak = row.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        let cutoff = peak * (T::one() - T::epsilon().sqrt());
        let pivot = row.iter().position(|&x| x.abs() >= cutoff).unwrap_or(0);
        let sign = if row[pivot] < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        for (o, &x) in vectors_t.row_mut(dst).iter_mut().zip(row) {
            *o = sign * x;
        }
    }
    Ok(EigenDecomposition { values, vectors_t })
}

/// Householder tridiagonalization. On entry `w` holds the symmetric matrix; on exit
/// `w` holds `Qᵀ` (row `j` is column `j` of the accumulated transform), `d` the diagonal
/// and `e[1..]` the subdiagonal.
fn tridiagonalize<T: Scalar>(w: &mut Mat<T>, d: &mut [T], e: &mut [T]) {
    reduce_to_tridiagonal(w, d, e);
    accumulate_transform(w, d, e);
}

/// Reduction phase of [`tridiagonalize`]. On exit `w[(i, i)]` is the `i`-th diagonal entry,
/// `e[1..]` the subdiagonal, and for `m ≥ 1` the reflector `I − u uᵀ/d[m]` has
/// `u = w.row(m)[..m]` (skipped when `d[m] = 0`). `Q = H_{n−1} ⋯ H_1`.
fn reduce_to_tridiagonal<T: Scalar>(w: &mut Mat<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    // `at(a, b)` refers to element (a, b) of the untransposed work matrix.
    macro_rules! at {
        ($a:expr, $b:expr) => {
            w[($b, $a)]
        };
    }

    for j in 0..n {
        d[j] = at!(n - 1, j);
    }

    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for &dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at!(i - 1, j);
                at!(i, j) = zero;
                at!(j, i) = zero;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = zero;
            }

            for j in 0..i {
                f = d[j];
                at!(j, i) = f;
                g = e[j] + at!(j, j) * f;
                // Column j of the lower triangle is row j of the stored matrix.
                let col = &w.row(j)[j + 1..i];
                for (k, &vkj) in (j + 1..i).zip(col) {
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let row = &mut w.row_mut(j)[j..i];
                for (vkj, (&ek, &dk)) in row.iter_mut().zip(e[j..i].iter().zip(&d[j..i])) {
                    *vkj -= f * ek + g * dk;
                }
                d[j] = at!(i - 1, j);
                at!(i, j) = zero;
            }
        }
        d[i] = h;
    }
}

/// Builds `Q` from the reflectors left by [`reduce_to_tridiagonal`].
fn accumulate_transform<T: Scalar>(w: &mut Mat<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    macro_rules! at {
        ($a:expr, $b:expr) => {
            w[($b, $a)]
        };
    }
    for i in 0..n - 1 {
        at!(n - 1, i) = at!(i, i);
        at!(i, i) = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = at!(k, i + 1) / h;
            }
            for j in 0..=i {
                let (head, tail) = w.as_mut_slice().split_at_mut((i + 1) * n);
                let col_next = &tail[..=i];
                let col_j = &mut head[j * n..j * n + i + 1];
                let g: T = col_next
                    .iter()
                    .zip(col_j.iter())
                    .map(|(&a, &b)| a * b)
                    .sum();
                for (v, &dk) in col_j.iter_mut().zip(&d[..=i]) {
                    *v -= g * dk;
                }
            }
        }
        for k in 0..=i {
            at!(k, i + 1) = zero;
        }
    }
    for j in 0..n {
        d[j] = at!(n - 1, j);
        at!(n - 1, j) = zero;
    }
    at!(n - 1, n - 1) = T::one();
    e[0] = zero;
}

/// Implicit QL on the tridiagonal `(d, e)`, rotating the rows of `w`.
fn ql_implicit<T: Scalar>(mut w: Option<&mut Mat<T>>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    let max_sweeps = 30 * n.max(1) + 60;
    let mut sweeps = 0usize;

    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::EigenNoConvergence(sweeps));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(w) = w.as_deref_mut() {
                        let (lo, hi) = w.as_mut_slice().split_at_mut((i + 1) * n);
                        let vi = &mut lo[i * n..];
                        let vi1 = &mut hi[..n];
                        for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

/// Euclidean projection onto the PSD cone, `V diag(max(λ, 0)) Vᵀ`.
///
/// All eigenvalues come from QL on the tridiagonal form. Eigenvectors are computed only for
/// the shorter side of the spectrum: `Σ_{λ>0} λ vvᵀ` directly, or `M − Σ_{λ<0} λ vvᵀ`.
pub fn psd_project<T: Scalar>(m: &SymmetricMatrix<T>) -> Result<SymmetricMatrix<T>> {
    if let Some((i, j)) = m.as_mat().first_non_finite() {
        return Err(Error::NonFinite(i, j));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(m.clone());
    }
    let mut q = m.as_mat().clone();
    let mut h = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    reduce_to_tridiagonal(&mut q, &mut h, &mut e);
    e[0] = T::zero();
    let d: Vec<T> = (0..n).map(|i| q[(i, i)]).collect();
    // Off-diagonal coupling rows i and i + 1.
    let off: Vec<T> = e[1..].to_vec();
    let mut values = d.clone();
    ql_implicit(None, &mut values, &mut e)?;
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let positives = values.iter().filter(|&&x| x > T::zero()).count();
    let (mut out, wanted, sign): (Mat<T>, Vec<T>, T) = if positives * 2 <= n {
        (Mat::zeros(n, n), values[n - positives..].to_vec(), T::one())
    } else {
        let negatives = values.iter().filter(|&&x| x < T::zero()).count();
        (m.as_mat().clone(), values[..negatives].to_vec(), -T::one())
    };
    let z = tridiagonal_eigenvectors(&d, &off, &wanted);
    for (&lam, mut v) in wanted.iter().zip(z) {
        // Back-transform v ← H_{n−1} ⋯ H_1 v.
        for mm in 1..n {
            if h[mm] == T::zero() {
                continue;
            }
            let u = &q.row(mm)[..mm];
            let g = u.iter().zip(&v[..mm]).map(|(&a, &b)| a * b).sum::<T>() / h[mm];
            for (x, &uk) in v[..mm].iter_mut().zip(u) {
                *x -= g * uk;
            }
        }
        add_rank_one(&mut out, sign * lam, &v);
    }
    Ok(SymmetricMatrix::from_symmetrized(out))
}

/// Unit eigenvectors of the symmetric tridiagonal matrix with diagonal `d` and off-diagonal
/// `off` for the ascending eigenvalue estimates `values`, by inverse iteration.
///
/// Eigenvalues closer than `1e-3·‖T‖` form a cluster; within a cluster the shifts are
/// separated by a few ulps of `‖T‖` and each iterate is orthogonalized against the vectors
/// already found (twice, for stability).
fn tridiagonal_eigenvectors<T: Scalar>(d: &[T], off: &[T], values: &[T]) -> Vec<Vec<T>> {
    let n = d.len();
    let mut norm = T::zero();
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { T::zero() };
        let right = if i + 1 < n { off[i].abs() } else { T::zero() };
        norm = norm.max(d[i].abs() + left + right);
    }
    if norm == T::zero() {
        norm = T::one();
    }
    let eps = T::epsilon();
    let cluster_tol = T::lit(1e-3) * norm;
    let shift_gap = T::lit(10.0) * eps * norm;
    let tiny = eps * norm;

    let mut out: Vec<Vec<T>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    let mut prev_shift = T::zero();
    for (idx, &lam) in values.iter().enumerate() {
        let mut shift = lam;
        if idx > 0 && lam - values[idx - 1] <= cluster_tol {
            if shift <= prev_shift + shift_gap {
                shift = prev_shift + shift_gap;
            }
        } else {
            cluster_start = idx;
        }
        prev_shift = shift;

        let lu = TridiagonalLu::new(d, off, shift, tiny);
        let mut x = start_vector::<T>(n, idx);
        for _ in 0..5 {
            lu.solve(&mut x);
            for _ in 0..2 {
                for prev in &out[cluster_start..idx] {
                    let dot: T = x.iter().zip(prev).map(|(&a, &b)| a * b).sum();
                    for (a, &b) in x.iter_mut().zip(prev) {
                        *a -= dot * b;
                    }
                }
            }
            let norm_x = x.iter().map(|&a| a * a).sum::<T>().sqrt();
            if norm_x == T::zero() || !norm_x.is_finite() {
                x = start_vector(n, idx + 7919);
                continue;
            }
            for a in &mut x {
                *a /= norm_x;
            }
        }
        out.push(x);
    }
    out
}

/// Fixed pseudo-random start vector with entries in `[-0.5, 0.5)`.
fn start_vector<T: Scalar>(n: usize, salt: usize) -> Vec<T> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (salt as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            T::lit((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        })
        .collect()
}

/// LU factorization with partial pivoting of `T − μI` for tridiagonal `T`; `U` has two
/// superdiagonals. Pivots smaller than `tiny` are replaced by `tiny`.
struct TridiagonalLu<T> {
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    l: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagonalLu<T> {
    fn new(d: &[T], off: &[T], mu: T, tiny: T) -> Self {
        let n = d.len();
        let mut u0: Vec<T> = d.iter().map(|&x| x - mu).collect();
        let mut u1: Vec<T> = off.to_vec();
        u1.push(T::zero());
        let mut u2 = vec![T::zero(); n];
        let mut l = vec![T::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let guard = |x: T| {
            if x.abs() < tiny {
                if x < T::zero() {
                    -tiny
                } else {
                    tiny
                }
            } else {
                x
            }
        };
        for k in 0..n.saturating_sub(1) {
            let sub = off[k];
            if u0[k].abs() >= sub.abs() {
                u0[k] = guard(u0[k]);
                l[k] = sub / u0[k];
                u0[k + 1] -= l[k] * u1[k];
            } else {
                // Row k + 1 becomes the pivot row.
                l[k] = u0[k] / sub;
                swapped[k] = true;
                let next_super = if k + 2 < n { u1[k + 1] } else { T::zero() };
                let new_next_diag = u1[k] - l[k] * u0[k + 1];
                u0[k] = sub;
                u1[k] = u0[k + 1];
                u2[k] = next_super;
                u0[k + 1] = new_next_diag;
                if k + 2 < n {
                    u1[k + 1] = -l[k] * next_super;
                }
            }
        }
        if n > 0 {
            u0[n - 1] = guard(u0[n - 1]);
        }
        Self {
            u0,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, y: &mut [T]) {
        let n = y.len();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                y.swap(k, k + 1);
            }
            y[k + 1] = y[k + 1] - self.l[k] * y[k];
        }
        for k in (0..n).rev() {
            let mut r = y[k];
            if k + 1 < n {
                r -= self.u1[k] * y[k + 1];
            }
            if k + 2 < n {
                r -= self.u2[k] * y[k + 2];
            }
            y[k] = r / self.u0[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<f64>]) -> SymmetricMatrix<f64> {
        SymmetricMatrix::new(Mat::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let eig = eigh(&SymmetricMatrix::<f64>::identity(3)).unwrap();
        for &v in eig.eigenvalues() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn all_ones_two_by_two() {
        let eig = eigh(&SymmetricMatrix::<f64>::ones(2)).unwrap();
        assert!((eig.eigenvalues()[0] - 2.0).abs() < 1e-14);
        assert!(eig.eigenvalues()[1].abs() < 1e-14);
    }

    #[test]
    fn rank_one_membership_outer_product() {
        let x = [1.0f64, 1.0, -1.0, -1.0];
        let m = SymmetricMatrix::new(Mat::outer(&x, &x)).unwrap();
        let eig = eigh(&m).unwrap();
        assert!((eig.eigenvalues()[0] - 4.0).abs() < 1e-12);
        for &v in &eig.eigenvalues()[1..] {
            assert!(v.abs() < 1e-12);
        }
        let top = eig.eigenvector(0);
        for (a, b) in top.iter().zip(&x) {
            assert!((a - b / 2.0).abs() < 1e-12, "{top:?}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = Mat::<f64>::identity(2);
        m[(1, 1)] = f64::NAN;
        let s = SymmetricMatrix::from_symmetrized(m);
        assert!(matches!(eigh(&s), Err(Error::NonFinite(1, 1))));
    }

    #[test]
    fn psd_project_clips_negative_diagonal() {
        let p = psd_project(&sym(&[vec![1.0, 0.0], vec![0.0, -1.0]])).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.0];
        for (a, b) in p.as_mat().as_slice().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_project_of_swap_matrix() {
        // eigenpairs (1, (1,1)/√2) and (−1, (1,−1)/√2); keeping the first gives E₂/2
        let p = psd_project(&sym(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        for &a in p.as_mat().as_slice() {
            assert!((a - 0.5).abs() < 1e-12);
        }
    }

    fn reference_psd(m: &SymmetricMatrix<f64>) -> Mat<f64> {
        eigh(m).unwrap().reconstruct_with(|x| x.max(0.0))
    }

    fn assert_close(a: &Mat<f64>, b: &Mat<f64>, tol: f64) {
        let diff = a.sub(b).max_abs();
        assert!(diff <= tol, "max difference {diff:e}");
    }

    #[test]
    fn psd_project_matches_full_decomposition() {
        let mut state = 1u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [1usize, 2, 3, 7, 20, 41] {
            let m = SymmetricMatrix::from_symmetrized(Mat::from_fn(n, n, |_, _| next()));
            assert_close(psd_project(&m).unwrap().as_mat(), &reference_psd(&m), 1e-10);
            // mostly-positive spectrum exercises the negative side
            let shifted = m.add(&SymmetricMatrix::identity(n).scale(0.8));
            assert_close(
                psd_project(&shifted).unwrap().as_mat(),
                &reference_psd(&shifted),
                1e-10,
            );
        }
    }

    #[test]
    fn psd_project_with_repeated_eigenvalues() {
        // block-constant matrices have large multiplicities on both sides
        for (k, s) in [(2usize, 5usize), (3, 4), (4, 6)] {
            let n = k * s;
            let m = SymmetricMatrix::from_symmetrized(Mat::from_fn(n, n, |i, j| {
                if i / s == j / s {
                    1.0
                } else {
                    -0.5
                }
            }));
            assert_close(psd_project(&m).unwrap().as_mat(), &reference_psd(&m), 1e-10);
            let neg = m.scale(-1.0).add(&SymmetricMatrix::identity(n).scale(0.25));
            assert_close(
                psd_project(&neg).unwrap().as_mat(),
                &reference_psd(&neg),
                1e-10,
            );
        }
        let i = SymmetricMatrix::<f64>::identity(6);
        assert_close(psd_project(&i).unwrap().as_mat(), i.as_mat(), 0.0);
        let ni = i.scale(-1.0);
        assert_close(psd_project(&ni).unwrap().as_mat(), &Mat::zeros(6, 6), 1e-14);
        let diag = SymmetricMatrix::from_symmetrized(Mat::diag(&[3.0, -1.0, 0.0, 2.0, -5.0]));
        assert_close(
            psd_project(&diag).unwrap().as_mat(),
            &Mat::diag(&[3.0, 0.0, 0.0, 2.0, 0.0]),
            1e-14,
        );
    }

    #[test]
    fn works_in_single_precision() {
        let m =
            SymmetricMatrix::<f32>::new(Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap())
                .unwrap();
        let eig = eigh(&m).unwrap();
        assert!((eig.eigenvalues()[0] - 3.0).abs() < 1e-5);
        assert!((eig.eigenvalues()[1] - 1.0).abs() < 1e-5);
    }
}
