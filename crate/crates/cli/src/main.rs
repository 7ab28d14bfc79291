//! `dqeig` — eigensolvers for dual quaternion Hermitian matrices.
//!
//! Subcommands: `solve` runs one of the three Jacobi-type algorithms on a
//! matrix file, `random`/`laplacian`/`demo` generate matrices in the JSON
//! schema, and `bench` runs seeded trial batches and writes CSV/JSONL
//! reports.
//!
//! Exit codes: 0 on convergence, 2 when a solve finishes with a degenerate
//! spectrum warning, 1 on any error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dqeig_core::solver::adaptive_s_repeats;
use dqeig_core::{
    build_laplacian, demo_p5, gen_random_hermitian, metric_elambda, run_bench,
    save_bench_reports, DQMatrix, ExperimentKind, ExperimentSpec, SolveStatus, SolverConfig,
    SolverKind,
};

#[derive(Parser)]
#[command(
    name = "dqeig",
    version,
    about = "Compute all eigenvalues and eigenvectors of dual quaternion Hermitian matrices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a matrix file with one of the Jacobi-type algorithms.
    Solve(SolveArgs),
    /// Generate a random dual quaternion Hermitian matrix.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the Laplacian of a random graph over unit dual quaternions.
    Laplacian {
        #[arg(long)]
        n: usize,
        /// Edge density s in (0, 1); the graph gets floor(s*n^2/2) edges.
        #[arg(long)]
        sparsity: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in demo matrices.
    Demo {
        #[command(subcommand)]
        which: DemoCmd,
    },
    /// Run seeded solver trials over a list of sizes and write a report.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum DemoCmd {
    /// The 5x5 cycle matrix whose standard part has two double eigenvalues.
    P5 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Max,
    Threshold,
    #[value(name = "3sjacobi")]
    ThreeStep,
}

impl From<Method> for SolverKind {
    fn from(m: Method) -> SolverKind {
        match m {
            Method::Max => SolverKind::MaxJacobi,
            Method::Threshold => SolverKind::Threshold,
            Method::ThreeStep => SolverKind::ThreeStep,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix file in the JSON schema {"n", "st", "du"}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Accuracy floor for max-element iteration.
    #[arg(long)]
    eps: Option<f64>,
    /// Initial standard-part threshold.
    #[arg(long)]
    delta: Option<f64>,
    /// Initial dual-part threshold (three-step only).
    #[arg(long)]
    delta1: Option<f64>,
    /// Square of the threshold decay factor.
    #[arg(long)]
    rho2: Option<f64>,
    /// Terminal threshold floor.
    #[arg(long)]
    eta: Option<f64>,
    /// Repeat count for the decoupling pass (three-step only).
    #[arg(long = "s")]
    s_repeats: Option<usize>,
    /// Derive the repeat count from the dual mass instead of --s.
    #[arg(long)]
    adaptive_s: bool,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Apply the cross-block eigenvector correction after the three-step run.
    #[arg(long)]
    post_correct: bool,
    /// Write the eigenvector matrix to a file in the matrix JSON schema.
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Print the full machine-readable report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    kind: BenchKind,
    /// Comma-separated list of matrix sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Edge density for laplacian benches.
    #[arg(long, default_value_t = 0.1)]
    sparsity: f64,
    /// Report stem; <stem>.csv and <stem>.jsonl are written.
    #[arg(long)]
    report: PathBuf,
    /// Solver to benchmark.
    #[arg(long, value_enum, default_value = "3sjacobi")]
    method: Method,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchKind {
    Random,
    Laplacian,
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. `dqeig ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too and must not exit as failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Solve(args) => solve(args),
        Cmd::Random { n, seed, out } => {
            write_matrix(&gen_random_hermitian(n, seed), out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Laplacian { n, sparsity, seed, out } => {
            write_matrix(&build_laplacian(n, sparsity, seed)?, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Demo { which } => match which {
            DemoCmd::P5 { out } => {
                write_matrix(&demo_p5(), out)?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Cmd::Bench(args) => bench(args),
    }
}

fn write_matrix(m: &DQMatrix, out: Option<PathBuf>) -> Result<(), Box<dyn std::error::Error>> {
    let text = m.to_json()?;
    match out {
        Some(path) => fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn build_config(args: &SolveArgs, q: &DQMatrix) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = v;
    }
    if let Some(v) = args.delta1 {
        cfg.delta1 = v;
    }
    if let Some(v) = args.rho2 {
        cfg.rho = v.sqrt();
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(v) = args.s_repeats {
        cfg.s_repeats = v;
    }
    if args.adaptive_s {
        cfg.s_repeats = adaptive_s_repeats(q, cfg.eta);
    }
    cfg.post_correct = args.post_correct;
    cfg
}

fn solve(args: SolveArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let q = DQMatrix::from_json(&fs::read_to_string(&args.input)?)?;
    let cfg = build_config(&args, &q);
    let report = SolverKind::from(args.method).solve(&q, &cfg)?;

    let e_lambda = metric_elambda(&q, &report)?;
    let r_final = report.final_r();

    if let Some(path) = &args.trace {
        let mut file = fs::File::create(path)?;
        report.trace_to_csv(&mut file)?;
    }
    if let Some(path) = &args.vectors {
        fs::write(path, report.eigenvectors.to_json()?)?;
    }

    if args.json {
        let doc = serde_json::json!({
            "status": report.status,
            "iterations": report.iterations,
            "bound_t": report.bound_t,
            "eigenvalues": report.eigenvalues,
            "e_lambda": e_lambda,
            "r": r_final,
            "final_offdiag_st": report.final_offdiag_st,
            "final_offdiag_du": report.final_offdiag_du,
            "elapsed_ms": report.elapsed_ms,
        });
        println!("{doc}");
    } else {
        let status = match report.status {
            SolveStatus::Converged => "converged",
            SolveStatus::DegenerateSpectrumWarning => "degenerate-spectrum-warning",
        };
        println!("status: {status}");
        println!("iterations: {} (worst-case bound {:.0})", report.iterations, report.bound_t);
        println!("eigenvalues (descending):");
        for e in &report.eigenvalues {
            println!("  {:>24.16e} {} {:.16e}ε", e.st, if e.du < 0.0 { "-" } else { "+" }, e.du.abs());
        }
        println!("e_lambda: {e_lambda:.4e}");
        println!("R: {r_final:.4e}");
        println!("elapsed: {:.3} ms", report.elapsed_ms);
    }

    Ok(match report.status {
        SolveStatus::Converged => ExitCode::SUCCESS,
        SolveStatus::DegenerateSpectrumWarning => ExitCode::from(2),
    })
}

fn bench(args: BenchArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let mut summaries = Vec::new();
    for &n in &args.sizes {
        let kind = match args.kind {
            BenchKind::Random => ExperimentKind::Random,
            BenchKind::Laplacian => ExperimentKind::Laplacian,
        };
        let spec = ExperimentSpec {
            kind,
            n,
            sparsity: args.sparsity,
            seed: args.seed,
            trials: args.trials,
            solver: args.method.into(),
            cfg: SolverConfig::default(),
        };
        let label = match args.kind {
            BenchKind::Random => format!("random-n{n}"),
            BenchKind::Laplacian => format!("laplacian-n{n}-s{}", args.sparsity),
        };
        let summary = run_bench(&spec)?;
        if let Some(a) = &summary.aggregate {
            println!(
                "{label}: trials={} e_lambda={:.2e} R={:.2e} iters={} cpu={:.3}s (σ_T={:.1e}, σ_N={:.1})",
                a.trial, a.e_lambda, a.r_final, a.iterations, a.cpu_seconds, a.sigma_t, a.sigma_n
            );
        } else {
            println!("{label}: no successful trials");
        }
        for (trial, err) in &summary.failures {
            eprintln!("{label}: trial {trial} failed: {err}");
        }
        summaries.push((label, summary));
    }
    let (csv, jsonl) = save_bench_reports(&args.report, &summaries)?;
    println!("report written to {} and {}", csv.display(), jsonl.display());
    Ok(ExitCode::SUCCESS)
}
