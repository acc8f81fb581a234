//! Monte-Carlo grids over model parameters, written as CSV.
//!
//! A run produces three files: the trial records (`out.csv`), a per-cell summary
//! (`out.summary.csv`) and per-trial wall times (`out.timing.csv`). The first two depend
//! only on the spec and are byte-identical across runs and thread counts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sample_graph, ModelSpec};
use crate::pipeline::{run_pipeline, PipelineParams, SdpVariant};
use crate::recovery::RankMode;
use crate::rng;
use crate::solver::{DiagMode, SolverConfig};

pub const RECORD_CSV_VERSION: &str = "# sbm-sdp trial-record v1";
pub const SUMMARY_CSV_VERSION: &str = "# sbm-sdp experiment-summary v1";
pub const TIMING_CSV_VERSION: &str = "# sbm-sdp timing v1";

fn default_epsilon() -> f64 {
    0.05
}

fn default_k() -> Vec<usize> {
    vec![2]
}

/// Parameter axes; cells are the Cartesian product in `n`, `k`, `a`, `b` order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
}

/// Optional replacements for [`SolverConfig`] fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub adapt_interval: Option<usize>,
}

impl SolverOverrides {
    pub fn apply(&self, mut cfg: SolverConfig<f64>) -> SolverConfig<f64> {
        if let Some(r) = self.rho {
            cfg.rho = r;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(t) = self.tol {
            cfg = cfg.with_tolerance(t);
        }
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        if let Some(a) = self.adapt_interval {
            cfg.adapt_interval = a;
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub grid: Grid,
    /// Target accuracy ε used for the `within_epsilon` column.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub sdp: SdpVariant,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub lambda_override: Option<f64>,
    #[serde(default)]
    pub rank_mode: RankMode,
    #[serde(default)]
    pub diag_mode: DiagMode,
}

/// One grid point. For `k = 2` the model is the classical one with `p = a/n`, `q = b/n`;
/// for `k ≥ 3` it is the balanced model with `s = n/k`, `p = a/s`, `q = b/s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

impl Cell {
    pub fn model(&self) -> Result<ModelSpec> {
        match self.k {
            0 | 1 => Err(Error::validation(format!(
                "grid K must be at least 2, got {}",
                self.k
            ))),
            2 => ModelSpec::classical(self.n, self.a / self.n as f64, self.b / self.n as f64),
            k => {
                if self.n % k != 0 {
                    return Err(Error::validation(format!(
                        "n = {} is not divisible by K = {k}",
                        self.n
                    )));
                }
                let s = self.n / k;
                ModelSpec::balanced(k, s, self.a / s as f64, self.b / s as f64)
            }
        }
    }

    /// `(a−b)²/(a+b)` for two communities, `(a−b)²/(a+b(K−1))` otherwise.
    pub fn signal(&self) -> f64 {
        let denom = if self.k == 2 {
            self.a + self.b
        } else {
            self.a + self.b * (self.k - 1) as f64
        };
        (self.a - self.b).powi(2) / denom
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.n.is_empty() || g.a.is_empty() || g.b.is_empty() || g.k.is_empty() {
            return Err(Error::validation(
                "every grid axis needs at least one value",
            ));
        }
        if self.trials == 0 {
            return Err(Error::validation("trials must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::validation(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        self.solver_config().validate()?;
        for cell in self.cells() {
            cell.model()?;
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        self.solver.apply(SolverConfig::default())
    }

    pub fn cells(&self) -> Vec<Cell> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            for &k in &g.k {
                for &a in &g.a {
                    for &b in &g.b {
                        out.push(Cell {
                            index: out.len(),
                            n,
                            k,
                            a,
                            b,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One row of the trial CSV. Metrics that do not apply are empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub signal: f64,
    pub epsilon: f64,
    pub sdp: SdpVariant,
    pub seed: u64,
    pub lambda: Option<f64>,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
    pub objective: Option<f64>,
    pub duality_gap: Option<f64>,
    pub primal_residual: Option<f64>,
    pub dual_residual: Option<f64>,
    pub misclassified_fraction: Option<f64>,
    pub frob_sq_error: Option<f64>,
    pub l1_error: Option<f64>,
    pub proj_error: Option<f64>,
    pub xhat_sq_error: Option<f64>,
    /// `eq5`: `‖Ẑ − x̄x̄ᵀ‖²_F ≤ εn²`; `eq8`: `‖Ẑ − Z̄‖²_F ≤ εn²`; `eq24`: `‖P̂ − P̄‖²_F ≤ 8ε‖P̄‖²_F`.
    pub within_epsilon: Option<bool>,
    /// Empty unless the trial failed.
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub cell: usize,
    pub trial: usize,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub signal: f64,
    pub trials: usize,
    pub failed: usize,
    pub converged_fraction: f64,
    pub mean_misclassified: Option<f64>,
    pub median_misclassified: Option<f64>,
    pub q90_misclassified: Option<f64>,
    pub max_misclassified: Option<f64>,
    pub within_epsilon_fraction: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub timings: Vec<TimingRecord>,
}

/// Seed of trial `trial` in cell `cell`.
pub fn trial_seed(master: u64, cell: usize, trial: usize) -> u64 {
    rng::child_seed(rng::child_seed(master, cell as u64), trial as u64)
}

/// Runs every (cell, trial) pair on a pool of `threads` workers (`0` = one per core).
/// Rows come back in (cell, trial) order. A failing trial becomes a row with `error` set.
pub fn run_experiment(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentOutput> {
    spec.validate()?;
    let jobs: Vec<(Cell, usize)> = spec
        .cells()
        .into_iter()
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let results: Vec<(TrialRecord, TimingRecord)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, t)| run_trial(spec, cell, t))
            .collect()
    });
    let (records, timings) = results.into_iter().unzip();
    Ok(ExperimentOutput { records, timings })
}

fn run_trial(spec: &ExperimentSpec, cell: Cell, trial: usize) -> (TrialRecord, TimingRecord) {
    let start = Instant::now();
    let seed = trial_seed(spec.master_seed, cell.index, trial);
    let mut rec = TrialRecord {
        cell: cell.index,
        trial,
        n: cell.n,
        k: cell.k,
        a: cell.a,
        b: cell.b,
        signal: cell.signal(),
        epsilon: spec.epsilon,
        sdp: spec.sdp,
        seed,
        lambda: None,
        converged: None,
        iterations: None,
        objective: None,
        duality_gap: None,
        primal_residual: None,
        dual_residual: None,
        misclassified_fraction: None,
        frob_sq_error: None,
        l1_error: None,
        proj_error: None,
        xhat_sq_error: None,
        within_epsilon: None,
        error: String::new(),
    };
    if let Err(e) = fill_trial(spec, cell, seed, &mut rec) {
        rec.error = e.to_string();
    }
    let timing = TimingRecord {
        cell: cell.index,
        trial,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    (rec, timing)
}

fn fill_trial(spec: &ExperimentSpec, cell: Cell, seed: u64, rec: &mut TrialRecord) -> Result<()> {
    let model = cell.model()?;
    let truth = model.assignment();
    let graph = sample_graph(&model, seed)?;
    let params = PipelineParams {
        sdp: spec.sdp,
        k: Some(cell.k),
        lambda_override: spec.lambda_override,
        rank_mode: spec.rank_mode,
        diag_mode: spec.diag_mode,
        solver: spec.solver_config(),
        seed: rng::child_seed(seed, 1),
    };
    let out = run_pipeline(&graph, Some(&truth), &params)?;
    let s = &out.solution;
    let r = &out.recovery;
    rec.lambda = Some(out.lambda);
    rec.converged = Some(s.converged);
    rec.iterations = Some(s.iterations);
    rec.objective = Some(s.objective);
    rec.duality_gap = out.duality_gap;
    rec.primal_residual = Some(s.primal_residual);
    rec.dual_residual = Some(s.dual_residual);
    rec.misclassified_fraction = r.misclassified_fraction;
    rec.frob_sq_error = r.frob_sq_error;
    rec.l1_error = r.l1_error;
    rec.proj_error = r.proj_error;
    rec.xhat_sq_error = r.xhat_sq_error;
    let n2 = (cell.n * cell.n) as f64;
    rec.within_epsilon = match spec.sdp {
        SdpVariant::Eq5 | SdpVariant::Eq8 => r.frob_sq_error.map(|f| f <= spec.epsilon * n2),
        // ‖P̄‖²_F = K − 1
        SdpVariant::Eq24 => r
            .proj_error
            .map(|e| e <= 8.0 * spec.epsilon * (cell.k - 1) as f64),
    };
    Ok(())
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize(spec: &ExperimentSpec, records: &[TrialRecord]) -> Vec<CellSummary> {
    spec.cells()
        .iter()
        .map(|cell| {
            let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.cell == cell.index).collect();
            let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
            let converged = rows.iter().filter(|r| r.converged == Some(true)).count();
            let mut mis: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.misclassified_fraction)
                .collect();
            mis.sort_by(|a, b| a.partial_cmp(b).expect("finite fractions"));
            let within: Vec<bool> = rows.iter().filter_map(|r| r.within_epsilon).collect();
            let stat =
                |f: &dyn Fn(&[f64]) -> f64| if mis.is_empty() { None } else { Some(f(&mis)) };
            CellSummary {
                cell: cell.index,
                n: cell.n,
                k: cell.k,
                a: cell.a,
                b: cell.b,
                signal: cell.signal(),
                trials: rows.len(),
                failed,
                converged_fraction: if rows.is_empty() {
                    0.0
                } else {
                    converged as f64 / rows.len() as f64
                },
                mean_misclassified: stat(&|m| m.iter().sum::<f64>() / m.len() as f64),
                median_misclassified: stat(&|m| quantile(m, 0.5)),
                q90_misclassified: stat(&|m| quantile(m, 0.9)),
                max_misclassified: stat(&|m| m[m.len() - 1]),
                within_epsilon_fraction: if within.is_empty() {
                    None
                } else {
                    Some(within.iter().filter(|&&w| w).count() as f64 / within.len() as f64)
                },
            }
        })
        .collect()
}

/// Writes `version`, then a header and one line per row.
pub fn write_csv<W: Write, S: Serialize>(mut out: W, version: &str, rows: &[S]) -> Result<()> {
    writeln!(out, "{version}").map_err(|e| Error::Internal(format!("writing CSV: {e}")))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Internal(format!("writing CSV: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::Internal(format!("writing CSV: {e}")))
}

/// Reads rows written by [`write_csv`]; lines starting with `#` are skipped.
pub fn read_csv<R: std::io::Read, S: serde::de::DeserializeOwned>(input: R) -> Result<Vec<S>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(|e| Error::validation(format!("CSV: {e}"))))
        .collect()
}

/// `out.csv` → `out.<tag>.csv`.
pub fn sibling_path(out: &Path, tag: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{tag}.csv"))
}

fn write_file<S: Serialize>(path: &Path, version: &str, rows: &[S]) -> Result<()> {
    let f = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(BufWriter::new(f), version, rows)
}

/// Writes the records to `out` and the summary and timings next to it.
pub fn write_experiment(
    spec: &ExperimentSpec,
    output: &ExperimentOutput,
    out: &Path,
) -> Result<()> {
    write_file(out, RECORD_CSV_VERSION, &output.records)?;
    write_file(
        &sibling_path(out, "summary"),
        SUMMARY_CSV_VERSION,
        &summarize(spec, &output.records),
    )?;
    write_file(
        &sibling_path(out, "timing"),
        TIMING_CSV_VERSION,
        &output.timings,
    )
}
