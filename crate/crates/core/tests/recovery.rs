use proptest::prelude::*;

use sbm_sdp::linalg::{frobenius_sq, linf_entrywise, Mat, SymmetricMatrix};
use sbm_sdp::model::{ground_truth, CommunityAssignment, ModelSpec};
use sbm_sdp::recovery::{
    labels_from_projection, misclassification, misclassification_by_enumeration,
    round_leading_eigenvector, spectral_projection, RankMode,
};

/// Renumbers labels by first appearance so none is empty.
fn compact(raw: Vec<usize>) -> CommunityAssignment {
    let mut seen = Vec::new();
    let labels = raw
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i + 1,
            None => {
                seen.push(*l);
                seen.len()
            }
        })
        .collect();
    CommunityAssignment::from_labels(labels).unwrap()
}

fn labeling() -> impl Strategy<Value = CommunityAssignment> {
    prop::collection::vec(1usize..5, 1..12).prop_map(compact)
}

fn same_partition(a: &CommunityAssignment, b: &CommunityAssignment) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a.same(i, j) == b.same(i, j)))
}

fn symmetric(n: usize) -> impl Strategy<Value = SymmetricMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n)
        .prop_map(move |v| SymmetricMatrix::from_symmetrized(Mat::from_vec(n, n, v).unwrap()))
}

#[test]
fn membership_outer_has_squared_norm_n_squared() {
    for h in [1, 5, 50, 150] {
        let n = 2 * h;
        let gt = ground_truth::<f64>(&ModelSpec::classical(n, 0.5, 0.2).unwrap()).unwrap();
        assert_eq!(
            frobenius_sq(gt.membership_outer().unwrap().as_mat()),
            (n * n) as f64
        );
    }
}

proptest! {
    #[test]
    fn misclassification_is_a_pseudometric(
        (a, b) in (1usize..10).prop_flat_map(|n| {
            let l = prop::collection::vec(1usize..5, n);
            (l.clone(), l).prop_map(|(x, y)| (compact(x), compact(y)))
        }),
    ) {
        let ab = misclassification(&a, &b).unwrap();
        prop_assert_eq!(ab, misclassification(&b, &a).unwrap());
        prop_assert_eq!(ab == 0.0, same_partition(&a, &b));
        prop_assert_eq!(misclassification(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - misclassification_by_enumeration(&a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn relabeling_does_not_change_the_distance(a in labeling(), shift in 1usize..4) {
        let k = a.labels().iter().max().copied().unwrap();
        let relabeled: Vec<usize> = a.labels().iter().map(|&l| (l - 1 + shift) % k + 1).collect();
        let b = CommunityAssignment::from_labels(relabeled).unwrap();
        prop_assert_eq!(misclassification(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn spectral_projection_is_a_symmetric_projection(
        (z, k) in (6usize..25).prop_flat_map(|n| (symmetric(n), 2usize..4)),
        twice in any::<bool>(),
    ) {
        let mode = if twice { RankMode::TwiceKMinusThree } else { RankMode::KMinusOne };
        let p = spectral_projection(&z, k, mode).unwrap();
        let m = p.as_mat();
        prop_assert!(m.max_asymmetry() <= 1e-8);
        prop_assert!(linf_entrywise(&m.matmul(m).sub(m)) <= 1e-8);
    }

    /// Checked on noisy two-block matrices `σσᵀ + N`. On arbitrary inputs 2-means on the
    /// line of rows `v_i v` need not split at zero.
    #[test]
    fn two_community_roundings_agree(
        (sigma, noise) in (4usize..25).prop_flat_map(|n| {
            (
                prop::collection::vec(any::<bool>(), n).prop_filter("both signs", |s| s.contains(&true) && s.contains(&false)),
                symmetric(n),
            )
        }),
        level in 0.0f64..0.3,
        seed in any::<u64>(),
    ) {
        let n = sigma.len();
        let x: Vec<f64> = sigma.iter().map(|&s| if s { 1.0 } else { -1.0 }).collect();
        let mut z = Mat::outer(&x, &x);
        z.axpy(level, noise.as_mat());
        let z = SymmetricMatrix::from_symmetrized(z);
        let (xhat, signs) = round_leading_eigenvector(&z).unwrap();
        let p = spectral_projection(&z, 2, RankMode::KMinusOne).unwrap();
        let labels = labels_from_projection(&p, 2, seed).unwrap();
        for i in (0..n).filter(|&i| xhat[i].abs() > 1e-9) {
            for j in (0..n).filter(|&j| xhat[j].abs() > 1e-9) {
                prop_assert_eq!(signs.same(i, j), labels.same(i, j), "vertices {} and {}", i, j);
            }
        }
    }
}
