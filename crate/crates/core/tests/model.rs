use proptest::prelude::*;

use sbm_sdp::linalg::{frobenius_sq, linf_entrywise, Mat, SymmetricMatrix};
use sbm_sdp::model::{
    expected_adjacency, ground_truth, sample_graph, CommunityAssignment, ModelSpec,
};
use sbm_sdp::solver::{check_feasibility, DiagMode, FeasibilityTolerance, FeasibleSet};

fn model() -> impl Strategy<Value = ModelSpec> {
    let pq = (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(x, y)| if x >= y { (x, y) } else { (y, x) });
    prop_oneof![
        (1usize..15, pq.clone()).prop_map(|(h, (p, q))| ModelSpec::classical(2 * h, p, q).unwrap()),
        (1usize..5, 1usize..8, pq.clone())
            .prop_map(|(k, s, (p, q))| ModelSpec::balanced(k, s, p, q).unwrap()),
        (prop::collection::vec(1usize..6, 1..4), pq).prop_map(|(sizes, (p, q))| {
            ModelSpec::general_two_level(CommunityAssignment::from_sizes(&sizes), p, q).unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn sampled_graphs_are_symmetric_with_unit_diagonal(spec in model(), seed in any::<u64>()) {
        let a = sample_graph(&spec, seed).unwrap().to_matrix::<f64>();
        let m = a.as_mat();
        for i in 0..spec.n() {
            prop_assert_eq!(m[(i, i)], 1.0);
            for j in 0..spec.n() {
                prop_assert_eq!(m[(i, j)], m[(j, i)]);
                prop_assert!(m[(i, j)] == 0.0 || m[(i, j)] == 1.0);
            }
        }
    }

    #[test]
    fn cluster_matrix_from_membership(h in 1usize..20) {
        let n = 2 * h;
        let gt = ground_truth::<f64>(&ModelSpec::classical(n, 0.5, 0.1).unwrap()).unwrap();
        let x = gt.membership().unwrap();
        let expected = Mat::from_fn(n, n, |i, j| (x[i] * x[j] + 1.0) / 2.0);
        prop_assert_eq!(gt.cluster.as_mat(), &expected);
    }

    #[test]
    fn projection_is_idempotent_with_rank_k_minus_one(k in 1usize..6, s in 1usize..8) {
        let p = ground_truth::<f64>(&ModelSpec::balanced(k, s, 0.5, 0.1).unwrap()).unwrap().projection;
        let p2 = p.as_mat().matmul(p.as_mat());
        prop_assert!(linf_entrywise(&p2.sub(p.as_mat())) <= 1e-10);
        prop_assert!((frobenius_sq(p.as_mat()) - (k - 1) as f64).abs() <= 1e-10);
    }
}

#[test]
fn balanced_reference_maximizer_is_a_scaled_projection() {
    let (k, s) = (3, 10);
    let inst =
        sbm_sdp::audit::ReferenceInstance::balanced(k, s, 0.5, 0.1, DiagMode::Equality).unwrap();
    let n = k * s;
    // (sK/(K−1))·P̄: unit diagonal, 1 within, −1/(K−1) across
    let spec = ModelSpec::balanced(k, s, 0.5, 0.1).unwrap();
    let a = spec.assignment();
    let expected = SymmetricMatrix::from_upper_fn(n, |i, j| if a.same(i, j) { 1.0 } else { -0.5 });
    assert!(linf_entrywise(&inst.z_r.as_mat().sub(expected.as_mat())) <= 1e-12);
    let set = FeasibleSet::KCommunity {
        k,
        diag: DiagMode::Equality,
    };
    assert!(check_feasibility(&inst.z_r, &set)
        .unwrap()
        .within(n, &FeasibilityTolerance::default()));
}

#[test]
fn empirical_mean_matches_expected_adjacency() {
    let a = CommunityAssignment::from_sizes(&[3, 2, 3]);
    let spec = ModelSpec::general_two_level(a, 0.7, 0.15).unwrap();
    let n = spec.n();
    let trials = 10_000;
    let mut sum = Mat::<f64>::zeros(n, n);
    for seed in 0..trials {
        sum.axpy(
            1.0,
            sample_graph(&spec, seed)
                .unwrap()
                .to_matrix::<f64>()
                .as_mat(),
        );
    }
    let expected = expected_adjacency::<f64>(&spec).unwrap();
    for i in 0..n {
        for j in 0..n {
            let p = expected.as_mat()[(i, j)];
            let mean = sum[(i, j)] / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((mean - p).abs() <= 5.0 * se, "({i},{j}): {mean} vs {p}");
        }
    }
}

#[test]
fn same_seed_same_graph() {
    let spec = ModelSpec::balanced(3, 7, 0.4, 0.1).unwrap();
    assert_eq!(
        sample_graph(&spec, 99).unwrap(),
        sample_graph(&spec, 99).unwrap()
    );
    assert_ne!(
        sample_graph(&spec, 99).unwrap(),
        sample_graph(&spec, 100).unwrap()
    );
}
