use sbm_sdp::audit::{
    audit_almost_maximizer, audit_deviation, audit_distinguishing, audit_grothendieck_psd,
    audit_sum_deviation, read_audit_csv, AuditReport, CutNormMode, ReferenceInstance,
};
use sbm_sdp::model::{CommunityAssignment, ModelSpec};
use sbm_sdp::solver::SolverConfig;

fn csv(report: &AuditReport) -> Vec<u8> {
    let mut buf = Vec::new();
    report.write_csv(&mut buf).unwrap();
    buf
}

fn check(report: &AuditReport, trials: usize) {
    assert_eq!(report.rows.len() + report.aborted, trials);
    assert_eq!(report.genuine_violations, 0, "{}", report.claim_id);
    let parsed = read_audit_csv(csv(report).as_slice()).unwrap();
    assert_eq!(parsed, report.rows);
}

#[test]
fn audits_are_deterministic_with_one_row_per_trial() {
    let spec = ModelSpec::classical(12, 0.8, 0.3).unwrap();
    let cfg = SolverConfig::default();
    let general =
        ModelSpec::general_two_level(CommunityAssignment::from_sizes(&[6, 4, 2]), 0.7, 0.2)
            .unwrap();
    let runs: Vec<(usize, Box<dyn Fn() -> AuditReport>)> = vec![
        (
            6,
            Box::new(|| audit_deviation(&spec, 6, 3, CutNormMode::Exact).unwrap()),
        ),
        (
            6,
            Box::new(|| audit_deviation(&spec, 6, 3, CutNormMode::Lower).unwrap()),
        ),
        (20, Box::new(|| audit_sum_deviation(&spec, 20, 3).unwrap())),
        (
            5,
            Box::new(|| audit_grothendieck_psd(6, 5, 3, &cfg).unwrap()),
        ),
        (
            4,
            Box::new(|| {
                let inst = ReferenceInstance::for_spec(&spec).unwrap();
                audit_almost_maximizer(&inst, &spec, 4, 3, &cfg).unwrap()
            }),
        ),
        (
            10,
            Box::new(|| audit_distinguishing(&general, 10, 3).unwrap()),
        ),
    ];
    for (trials, run) in runs {
        let a = run();
        check(&a, trials);
        assert_eq!(csv(&a), csv(&run()), "{}", a.claim_id);
    }
}

#[test]
fn lower_mode_never_exceeds_exact_mode() {
    let spec = ModelSpec::classical(16, 0.6, 0.2).unwrap();
    let exact = audit_deviation(&spec, 10, 8, CutNormMode::Exact).unwrap();
    let lower = audit_deviation(&spec, 10, 8, CutNormMode::Lower).unwrap();
    for (e, l) in exact.rows.iter().zip(&lower.rows) {
        assert_eq!(e.bound, l.bound);
        assert!(l.observed <= e.observed + 1e-9);
    }
}

#[test]
fn deviation_below_hypothesis_is_reported_not_asserted() {
    // p̄ = 1/4 < 9/16
    let spec = ModelSpec::classical(16, 0.5, 0.5).unwrap();
    let r = audit_deviation(&spec, 5, 0, CutNormMode::Exact).unwrap();
    assert!(r.rows.iter().all(|row| !row.hypothesis_ok));
    assert_eq!(r.genuine_violations, 0);
}

#[test]
fn almost_maximizer_sandwich() {
    let spec = ModelSpec::classical(20, 0.9, 0.1).unwrap();
    let inst = ReferenceInstance::for_spec(&spec).unwrap();
    let r = audit_almost_maximizer(&inst, &spec, 50, 17, &SolverConfig::default()).unwrap();
    assert_eq!(r.aborted, 0);
    assert_eq!(r.violations, 0);
    assert!(r.margin.min > 0.0);
}

#[test]
fn distinguishing_holds_on_random_feasible_points() {
    let spec =
        ModelSpec::general_two_level(CommunityAssignment::from_sizes(&[15, 10, 5]), 0.6, 0.1)
            .unwrap();
    let r = audit_distinguishing(&spec, 200, 5).unwrap();
    assert_eq!(r.violations, 0);
    assert!(r.margin.min > 0.0);
}
