use std::path::Path;
use std::process::{Command, Output};

use sbm_sdp::audit::read_audit_csv;
use sbm_sdp::experiment::{read_csv, CellSummary, TimingRecord, TrialRecord};
use sbm_sdp::pipeline::PipelineRecord;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sbm-sdp"));
    c.env_remove("SBM_SDP_THREADS");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn generate_writes_files_and_echoes_stats() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"model": "classical", "n": 100, "p": 0.2, "q": 0.1}"#,
    );
    let o = run(
        &["generate", "m.json", "--out", "g", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((stats["a"].as_f64().unwrap() - 20.0).abs() < 1e-9);
    assert!((stats["b"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    let graph = sbm_sdp::io::read_adjacency_file(&dir.path().join("g.mtx")).unwrap();
    assert_eq!(graph.n(), 100);
    let labels = sbm_sdp::io::read_assignment_file(&dir.path().join("g.labels")).unwrap();
    assert_eq!(labels.sizes(), vec![50, 50]);

    let first = std::fs::read(dir.path().join("g.mtx")).unwrap();
    let o = run(
        &["generate", "m.json", "--out", "h", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(first, std::fs::read(dir.path().join("h.mtx")).unwrap());
}

#[test]
fn generate_rejects_q_above_p() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"model": "classical", "n": 10, "p": 0.1, "q": 0.3}"#,
    );
    let o = run(&["generate", "m.json", "--out", "g"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("q <= p"));
}

#[test]
fn pipeline_recovers_deterministic_instance() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"model": "classical", "n": 16, "p": 1.0, "q": 0.0}"#,
    );
    assert_eq!(
        code(&run(&["generate", "m.json", "--out", "g"], dir.path())),
        0
    );
    for sdp in ["eq5", "eq8", "eq24"] {
        let o = run(
            &[
                "pipeline", "g.mtx", "--truth", "g.labels", "--sdp", sdp, "--out", "r.csv",
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{sdp}: {}", String::from_utf8_lossy(&o.stderr));
        let rows: Vec<PipelineRecord> =
            read_csv(std::fs::File::open(dir.path().join("r.csv")).unwrap()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].misclassified_fraction, Some(0.0), "{sdp}");
        if sdp == "eq24" {
            assert!(rows[0].proj_error.is_some());
        }
    }
}

#[test]
fn pipeline_eq8_uses_lambda_override_as_entry_sum() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"model": "general", "sizes": [6, 4], "p": 0.9, "q": 0.1}"#,
    );
    assert_eq!(
        code(&run(
            &["generate", "m.json", "--out", "g", "--seed", "1"],
            dir.path()
        )),
        0
    );
    // Σ|C_k|² = 52
    let o = run(
        &[
            "pipeline", "g.mtx", "--sdp", "eq8", "--k", "2", "--lambda", "40", "--tol", "1e-5",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<PipelineRecord> = read_csv(o.stdout.as_slice()).unwrap();
    assert!((rows[0].z_sum - 40.0).abs() < 1e-6, "{}", rows[0].z_sum);
    assert_eq!(rows[0].lambda, 40.0);

    let o = run(
        &["pipeline", "g.mtx", "--sdp", "eq8", "--k", "2"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn experiment_rows_summary_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "e.json",
        r#"{"grid": {"n": [20], "a": [16], "b": [2]}, "trials": 1, "master_seed": 9, "solver": {"tol": 1e-4}}"#,
    );
    let o = run(&["experiment", "e.json", "--out", "a.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<TrialRecord> =
        read_csv(std::fs::File::open(dir.path().join("a.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    let summary: Vec<CellSummary> =
        read_csv(std::fs::File::open(dir.path().join("a.summary.csv")).unwrap()).unwrap();
    assert_eq!(summary.len(), 1);
    let timing: Vec<TimingRecord> =
        read_csv(std::fs::File::open(dir.path().join("a.timing.csv")).unwrap()).unwrap();
    assert_eq!(timing.len(), 1);

    let o = bin()
        .args(["experiment", "e.json", "--out", "b.csv"])
        .env("SBM_SDP_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    for (x, y) in [("a.csv", "b.csv"), ("a.summary.csv", "b.summary.csv")] {
        assert_eq!(
            std::fs::read(dir.path().join(x)).unwrap(),
            std::fs::read(dir.path().join(y)).unwrap()
        );
    }
}

#[test]
fn experiment_rejects_invalid_spec() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "e.json",
        r#"{"grid": {"n": [20], "a": [16], "b": [2]}, "trials": 0, "master_seed": 9}"#,
    );
    assert_eq!(
        code(&run(
            &["experiment", "e.json", "--out", "a.csv"],
            dir.path()
        )),
        2
    );
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "audit",
            "--claim",
            "grothendieck_psd",
            "--n",
            "10",
            "--trials",
            "100",
            "--out",
            "g.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_audit_csv(std::fs::File::open(dir.path().join("g.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 100);

    let o = run(
        &[
            "audit",
            "--claim",
            "deviation",
            "--n",
            "16",
            "--mode",
            "exact",
            "--trials",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let rows = read_audit_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 5);
    // p̄ = 1/4 < 9/16
    assert!(rows.iter().all(|r| !r.hypothesis_ok));

    assert_eq!(
        code(&run(&["audit", "--claim", "nonsense"], dir.path())),
        64
    );
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 64);
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
}
