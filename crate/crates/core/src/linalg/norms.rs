//! Entrywise norms and the ℓ∞→ℓ1 (cut) norm.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::mat::Mat;
use crate::rng;
use crate::scalar::Scalar;

/// Largest dimension accepted by [`cut_norm_exact`].
pub const CUT_NORM_EXACT_MAX_DIM: usize = 26;

/// `‖M‖²_F = Σ m_ij²`.
pub fn frobenius_sq<T: Scalar>(m: &Mat<T>) -> T {
    m.as_slice().iter().map(|&x| x * x).sum()
}

/// `‖M‖₁ = Σ |m_ij|`, the ℓ1 norm of the matrix viewed as a vector.
pub fn l1_entrywise<T: Scalar>(m: &Mat<T>) -> T {
    m.as_slice().iter().map(|&x| x.abs()).sum()
}

/// `max |m_ij|`.
pub fn linf_entrywise<T: Scalar>(m: &Mat<T>) -> T {
    m.max_abs()
}

/// `‖B‖∞→1 = max_{s ∈ {±1}ⁿ} ‖Bs‖₁`, by exhaustive enumeration.
///
/// `t = sign(Bs)` is implicit in the ℓ1 norm, so only `s` is enumerated, and `s` and `−s`
/// give the same value, so the first coordinate stays fixed. Consecutive sign vectors
/// follow a Gray code, which makes each step a single column update of `Bs`.
pub fn cut_norm_exact<T: Scalar>(b: &Mat<T>) -> Result<T> {
    let cols = b.cols();
    if cols > CUT_NORM_EXACT_MAX_DIM || b.rows() > CUT_NORM_EXACT_MAX_DIM {
        return Err(Error::TooLarge {
            what: "exact cut norm",
            n: cols.max(b.rows()),
            max: CUT_NORM_EXACT_MAX_DIM,
        });
    }
    if cols == 0 || b.rows() == 0 {
        return Ok(T::zero());
    }
    let bt = b.transpose();
    let two = T::lit(2.0);
    let mut s = vec![T::one(); cols];
    let recompute = |s: &[T], y: &mut Vec<T>| {
        *y = b.matvec(s);
    };
    let mut y = Vec::new();
    recompute(&s, &mut y);
    let mut best = l1(&y);

    let steps: u64 = 1u64 << (cols - 1);
    for step in 1..steps {
        // Coordinate flipped by the binary-reflected Gray code at this step; never column 0.
        let j = step.trailing_zeros() as usize + 1;
        let delta = -two * s[j];
        s[j] = -s[j];
        if step & 0xFFFF == 0 {
            recompute(&s, &mut y);
        } else {
            for (yi, &bij) in y.iter_mut().zip(bt.row(j)) {
                *yi += delta * bij;
            }
        }
        let v = l1(&y);
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

#[inline]
fn l1<T: Scalar>(y: &[T]) -> T {
    y.iter().map(|&x| x.abs()).sum()
}

/// Lower bound on `‖B‖∞→1` from greedy single-coordinate-flip ascent on `s ↦ ‖Bs‖₁`.
///
/// The first start is the all-ones vector, the remaining `restarts − 1` are uniform random
/// sign vectors drawn from `seed`. Each ascent repeatedly applies the flip with the largest
/// strict improvement until none remains. The returned value is attained by an explicit
/// `(s, t)` pair, so it never exceeds the true norm.
pub fn cut_norm_lower<T: Scalar>(b: &Mat<T>, restarts: usize, seed: u64) -> T {
    let (m, n) = (b.rows(), b.cols());
    if m == 0 || n == 0 {
        return T::zero();
    }
    let bt = b.transpose();
    let two = T::lit(2.0);
    let mut rng = rng::stream(seed, 0);
    let mut best = T::zero();
    for r in 0..restarts.max(1) {
        let mut s: Vec<T> = if r == 0 {
            vec![T::one(); n]
        } else {
            (0..n)
                .map(|_| {
                    if rng.random::<bool>() {
                        T::one()
                    } else {
                        -T::one()
                    }
                })
                .collect()
        };
        let mut y = b.matvec(&s);
        let mut value = l1(&y);
        loop {
            let mut best_gain = T::zero();
            let mut best_j = None;
            for (j, &sj) in s.iter().enumerate() {
                let delta = -two * sj;
                let flipped: T = y
                    .iter()
                    .zip(bt.row(j))
                    .map(|(&yi, &bij)| (yi + delta * bij).abs())
                    .sum();
                let gain = flipped - value;
                if gain > best_gain {
                    best_gain = gain;
                    best_j = Some(j);
                }
            }
            let Some(j) = best_j else { break };
            let delta = -two * s[j];
            s[j] = -s[j];
            for (yi, &bij) in y.iter_mut().zip(bt.row(j)) {
                *yi += delta * bij;
            }
            let next = l1(&y);
            if next <= value {
                break;
            }
            value = next;
        }
        // Evaluate Σ b_ij s_i t_j at the final pair with t = sign(Bs) from scratch.
        let y = b.matvec(&s);
        let achieved = l1(&y);
        if achieved > best {
            best = achieved;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Straight enumeration over both `s` and `t`, kept separate from the Gray-code path.
    fn brute_force(b: &Mat<f64>) -> f64 {
        let (m, n) = (b.rows(), b.cols());
        let mut best = f64::NEG_INFINITY;
        for smask in 0u32..(1 << m) {
            for tmask in 0u32..(1 << n) {
                let mut v = 0.0;
                for i in 0..m {
                    let si = if smask >> i & 1 == 1 { -1.0 } else { 1.0 };
                    for j in 0..n {
                        let tj = if tmask >> j & 1 == 1 { -1.0 } else { 1.0 };
                        v += b[(i, j)] * si * tj;
                    }
                }
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn all_ones_and_identity() {
        for n in 1..=8 {
            assert_eq!(
                cut_norm_exact(&Mat::<f64>::ones(n)).unwrap(),
                (n * n) as f64
            );
            assert_eq!(cut_norm_exact(&Mat::<f64>::identity(n)).unwrap(), n as f64);
        }
    }

    #[test]
    fn two_by_two_alternating() {
        let b = Mat::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(brute_force(&b), 4.0);
        assert_eq!(cut_norm_exact(&b).unwrap(), 4.0);
    }

    #[test]
    fn matches_brute_force_on_fixed_matrices() {
        let mut rng = rng::stream(11, 0);
        for n in 1..=6 {
            let b = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let exact = cut_norm_exact(&b).unwrap();
            assert!((exact - brute_force(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_large_dimension() {
        let b = Mat::<f64>::zeros(27, 27);
        assert!(matches!(
            cut_norm_exact(&b),
            Err(Error::TooLarge { n: 27, .. })
        ));
    }

    #[test]
    fn lower_bound_on_all_ones_and_zero() {
        for seed in 0..5 {
            assert_eq!(cut_norm_lower(&Mat::<f64>::ones(7), 3, seed), 49.0);
        }
        assert_eq!(cut_norm_lower(&Mat::<f64>::zeros(5, 5), 4, 1), 0.0);
    }

    #[test]
    fn entrywise_norms_of_all_ones() {
        let e = Mat::<f64>::ones(5);
        assert_eq!(frobenius_sq(&e), 25.0);
        assert_eq!(l1_entrywise(&e), 25.0);
        assert_eq!(linf_entrywise(&e), 1.0);
    }
}
