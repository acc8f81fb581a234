use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use sbm_sdp::audit::{
    audit_almost_maximizer, audit_deviation, audit_distinguishing, audit_grothendieck_psd,
    audit_sum_deviation, AuditReport, CutNormMode, ReferenceInstance,
};
use sbm_sdp::experiment::{run_experiment, write_experiment, ExperimentSpec};
use sbm_sdp::io;
use sbm_sdp::model::{model_statistics, sample_graph, CommunityAssignment, ModelSpec};
use sbm_sdp::pipeline::{
    run_pipeline, PipelineParams, PipelineRecord, SdpVariant, PIPELINE_CSV_VERSION,
};
use sbm_sdp::recovery::RankMode;
use sbm_sdp::solver::{DiagMode, SolverConfig};
use sbm_sdp::Error;

const THREADS_ENV: &str = "SBM_SDP_THREADS";

const EXIT_VIOLATION: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "sbm-sdp",
    version,
    about = "SDP community detection for stochastic block models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from a JSON model file.
    Generate(GenerateArgs),
    /// Solve one SDP on a graph and round the solution.
    Pipeline(PipelineArgs),
    /// Run a Monte-Carlo grid from a JSON experiment file.
    Experiment(ExperimentArgs),
    /// Check one of the deviation or optimality inequalities on random instances.
    Audit(AuditArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Primal and dual residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// ADMM penalty.
    #[arg(long)]
    rho: Option<f64>,
    /// Iterations between penalty updates, 0 to keep it fixed.
    #[arg(long = "adapt-interval")]
    adapt_interval: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig<f64> {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol {
            cfg = cfg.with_tolerance(t);
        }
        if let Some(m) = self.max_iter {
            cfg = cfg.with_max_iterations(m);
        }
        if let Some(r) = self.rho {
            cfg.rho = r;
        }
        if let Some(a) = self.adapt_interval {
            cfg.adapt_interval = a;
        }
        cfg
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Model file, e.g. {"model": "classical", "n": 100, "p": 0.2, "q": 0.1}.
    spec: PathBuf,
    /// Output prefix; writes PREFIX.mtx and PREFIX.labels.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Diag {
    Inequality,
    Equality,
}

impl From<Diag> for DiagMode {
    fn from(d: Diag) -> Self {
        match d {
            Diag::Inequality => DiagMode::Inequality,
            Diag::Equality => DiagMode::Equality,
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Adjacency matrix in MatrixMarket format.
    graph: PathBuf,
    /// Ground-truth labels, one per line.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value = "eq5")]
    sdp: SdpVariant,
    /// Sum constraint for eq8.
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of communities.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "rank-mode", default_value = "k-1")]
    rank_mode: RankMode,
    #[arg(long, value_enum, default_value = "inequality")]
    diag: Diag,
    /// Seed for k-means rounding.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment file.
    spec: PathBuf,
    /// Trial CSV; the summary and timings are written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Replaces master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    sdp: Option<SdpVariant>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "rank-mode")]
    rank_mode: Option<RankMode>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Claim {
    Deviation,
    SumDeviation,
    GrothendieckPsd,
    AlmostMax,
    Distinguishing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Lower,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, value_enum)]
    claim: Claim,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Balanced model with K blocks of n/K vertices.
    #[arg(long)]
    k: Option<usize>,
    /// Community sizes of a general two-level model, e.g. 15,10,5.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cut-norm evaluation for the deviation claim.
    #[arg(long, value_enum, default_value = "lower")]
    mode: Mode,
    /// CSV output; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
enum ModelFile {
    Classical { n: usize, p: f64, q: f64 },
    Balanced { k: usize, s: usize, p: f64, q: f64 },
    General { sizes: Vec<usize>, p: f64, q: f64 },
}

impl ModelFile {
    fn spec(&self) -> sbm_sdp::Result<ModelSpec> {
        match *self {
            ModelFile::Classical { n, p, q } => ModelSpec::classical(n, p, q),
            ModelFile::Balanced { k, s, p, q } => ModelSpec::balanced(k, s, p, q),
            ModelFile::General { ref sizes, p, q } => {
                ModelSpec::general_two_level(CommunityAssignment::from_sizes(sizes), p, q)
            }
        }
    }
}

enum Failure {
    Validation(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::EigenNoConvergence(_) => Failure::Internal(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Validation(format!("{}: {e}", path.display()))
}

/// Opens `path`, or standard output when `None`.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| io_failure(p, e))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| io_failure(&args.spec, e))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", args.spec.display())))?;
    let spec = file.spec()?;
    let graph = sample_graph(&spec, args.seed)?;
    let stem = args.out.to_string_lossy();
    io::write_adjacency_file(&graph, Path::new(&format!("{stem}.mtx")))?;
    io::write_assignment_file(&spec.assignment(), Path::new(&format!("{stem}.labels")))?;
    let stats = model_statistics(&spec)?;
    println!(
        "{}",
        serde_json::to_string(&stats).map_err(|e| Failure::Internal(e.to_string()))?
    );
    Ok(0)
}

fn pipeline(args: &PipelineArgs) -> Result<u8, Failure> {
    let graph = io::read_adjacency_file(&args.graph)?;
    let truth = args
        .truth
        .as_deref()
        .map(io::read_assignment_file)
        .transpose()?;
    let params = PipelineParams {
        sdp: args.sdp,
        k: args.k,
        lambda_override: args.lambda,
        rank_mode: args.rank_mode,
        diag_mode: args.diag.into(),
        solver: args.solver.config(),
        seed: args.seed,
    };
    let out = run_pipeline(&graph, truth.as_ref(), &params)?;
    let record = PipelineRecord::new(&out, &params);
    let w = output(args.out.as_deref())?;
    sbm_sdp::experiment::write_csv(w, PIPELINE_CSV_VERSION, &[record])?;
    Ok(0)
}

fn experiment(args: &ExperimentArgs) -> Result<u8, Failure> {
    let mut spec = ExperimentSpec::from_file(&args.spec)?;
    if let Some(s) = args.seed {
        spec.master_seed = s;
    }
    if let Some(s) = args.sdp {
        spec.sdp = s;
    }
    if args.lambda.is_some() {
        spec.lambda_override = args.lambda;
    }
    if let Some(r) = args.rank_mode {
        spec.rank_mode = r;
    }
    if args.tol.is_some() {
        spec.solver.tol = args.tol;
    }
    if args.max_iter.is_some() {
        spec.solver.max_iterations = args.max_iter;
    }
    spec.validate()?;
    let result = run_experiment(&spec, args.threads)?;
    write_experiment(&spec, &result, &args.out)?;
    let failed = result
        .records
        .iter()
        .filter(|r| !r.error.is_empty())
        .count();
    eprintln!("{} trials, {failed} failed", result.records.len());
    Ok(0)
}

fn audit_model(args: &AuditArgs) -> sbm_sdp::Result<ModelSpec> {
    match (&args.sizes, args.k) {
        (Some(sizes), _) => {
            ModelSpec::general_two_level(CommunityAssignment::from_sizes(sizes), args.p, args.q)
        }
        (None, Some(k)) if k >= 2 => {
            if args.n % k != 0 {
                return Err(Error::Validation(format!(
                    "n = {} is not divisible by K = {k}",
                    args.n
                )));
            }
            ModelSpec::balanced(k, args.n / k, args.p, args.q)
        }
        _ => ModelSpec::classical(args.n, args.p, args.q),
    }
}

fn audit(args: &AuditArgs) -> Result<u8, Failure> {
    let cfg = args.solver.config();
    let report: AuditReport = match args.claim {
        Claim::GrothendieckPsd => audit_grothendieck_psd(args.n, args.trials, args.seed, &cfg)?,
        claim => {
            let spec = audit_model(args)?;
            match claim {
                Claim::Deviation => {
                    let mode = match args.mode {
                        Mode::Exact => CutNormMode::Exact,
                        Mode::Lower => CutNormMode::Lower,
                    };
                    audit_deviation(&spec, args.trials, args.seed, mode)?
                }
                Claim::SumDeviation => audit_sum_deviation(&spec, args.trials, args.seed)?,
                Claim::AlmostMax => {
                    let instance = ReferenceInstance::for_spec(&spec)?;
                    audit_almost_maximizer(&instance, &spec, args.trials, args.seed, &cfg)?
                }
                Claim::Distinguishing => audit_distinguishing(&spec, args.trials, args.seed)?,
                Claim::GrothendieckPsd => unreachable!(),
            }
        }
    };
    report.write_csv(output(args.out.as_deref())?)?;
    eprintln!(
        "{}: {} trials, {} violations ({} genuine), {} aborted, min margin {:e}",
        report.claim_id,
        report.trials,
        report.violations,
        report.genuine_violations,
        report.aborted,
        report.margin.min
    );
    Ok(if report.genuine_violations > 0 {
        EXIT_VIOLATION
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Experiment(a) => experiment(a),
        Command::Audit(a) => audit(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
