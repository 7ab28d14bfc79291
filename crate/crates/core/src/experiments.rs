//! Seeded experiment generators, accuracy metrics, and the benchmark runner.
//!
//! Every generator takes an explicit seed and drives a ChaCha8 stream, so the
//! same seed reproduces the same matrix bit-for-bit on every platform. The
//! benchmark runner executes independent trials (seeded `seed + trial index`)
//! in parallel and aggregates mean values with standard deviations.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::dualquat::DualQuaternion;
use crate::error::{Error, Result};
use crate::givens::{apply_dual_givens, diag2_dual};
use crate::matrix::{DQMatrix, DQVector, QMatrix};
use crate::quaternion::Quaternion;
use crate::solver::{jacobi_max, jacobi_three_step, jacobi_threshold, SolveReport, SolverConfig};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_quat(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

/// Convergence metric: `R = sqrt(Σ_{i≠j}(|st_ij|² + |du_ij|²)) / D` where `D`
/// is the `Fᴿ`-norm of the matrix the iteration started from.
pub fn metric_r(q: &DQMatrix, d: f64) -> Result<f64> {
    if d <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let (n_st, n_du) = q.offdiag_measure()?;
    Ok((n_st + n_du).sqrt() / d)
}

/// Mean eigenpair residual `e_λ = (1/n)·Σᵢ ‖Q ûᵢ − λ̂ᵢ ûᵢ‖₂ᴿ`, evaluated
/// against the original matrix.
pub fn metric_elambda(q: &DQMatrix, report: &SolveReport) -> Result<f64> {
    let n = q.rows();
    if report.eigenvalues.len() != n || report.eigenvectors.rows() != n {
        return Err(Error::ShapeMismatch("report does not match the matrix size".into()));
    }
    let mut total = 0.0;
    for i in 0..n {
        let u = report.eigenvectors.column(i);
        let qu = q.matvec(&u)?;
        let lu = DQVector {
            entries: u.entries.iter().map(|e| *e * report.eigenvalues[i]).collect(),
        };
        total += qu.sub(&lu)?.norm_2r();
    }
    Ok(total / n as f64)
}

/// Random dual quaternion Hermitian matrix: two independent Gaussian
/// quaternion matrices, each symmetrized as `(B + B*)/2`.
pub fn gen_random_hermitian(n: usize, seed: u64) -> DQMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        QMatrix::from_fn(n, n, |_, _| random_quat(rng)).hermitize().expect("square by construction")
    };
    let st = draw(&mut rng);
    let du = draw(&mut rng);
    DQMatrix { st, du }
}

/// Random unit dual quaternion vector: standard parts uniform on the unit
/// 3-sphere, dual parts Gaussian projected so `sc(q_st* q_du) = 0`, which
/// makes every entry's magnitude exactly `1 + 0ε`.
pub fn gen_unit_dq_vector(n: usize, seed: u64) -> DQVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n)
        .map(|_| {
            let mut s = random_quat(&mut rng);
            while s.magnitude() < 1e-6 {
                s = random_quat(&mut rng);
            }
            let s = s / s.magnitude();
            let g = random_quat(&mut rng);
            DualQuaternion::new(s, g - s * s.dot(g))
        })
        .collect();
    DQVector { entries }
}

/// Random unitary dual quaternion matrix assembled as a product of exact
/// 2×2 dual Givens blocks; mainly a test fixture for invariance properties.
pub fn gen_random_unitary(n: usize, seed: u64) -> DQMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e3779b97f4a7c15));
    let mut u = DQMatrix::identity(n);
    if n < 2 {
        return u;
    }
    for _ in 0..(3 * n) {
        let k = rng.random_range(0..n - 1);
        let l = rng.random_range(k + 1..n);
        // random Hermitian 2x2 with a safely appreciable off-diagonal
        let mut block = DQMatrix::zeros(2, 2);
        let mut c = random_quat(&mut rng);
        while c.magnitude() < 0.1 {
            c = random_quat(&mut rng);
        }
        block.st.set(0, 0, Quaternion::real(normal(&mut rng)));
        block.st.set(1, 1, Quaternion::real(normal(&mut rng)));
        block.st.set(0, 1, c);
        block.st.set(1, 0, c.conj());
        let z = random_quat(&mut rng);
        block.du.set(0, 0, Quaternion::real(normal(&mut rng)));
        block.du.set(1, 1, Quaternion::real(normal(&mut rng)));
        block.du.set(0, 1, z);
        block.du.set(1, 0, z.conj());
        let plan = diag2_dual(&block).expect("off-diagonal is appreciable").at(k, l);
        // accumulate without rotating any matrix: apply to a throwaway identity
        let mut scratch = DQMatrix::identity(n);
        apply_dual_givens(&mut scratch, &plan, &mut u).expect("indices are in range");
    }
    u
}

/// Random unitary quaternion matrix (standard parts of [`gen_random_unitary`]
/// blocks only).
pub fn gen_random_q_unitary(n: usize, seed: u64) -> QMatrix {
    gen_random_unitary(n, seed).st
}

/// Laplacian of a random graph with `⌊s·n²/2⌋` undirected edges over `n`
/// vertices: degree diagonal minus the adjacency `â_ij = q̂ᵢ* q̂ⱼ` built from
/// a random unit dual quaternion vector. Hermitian by construction and
/// singular with the zero mode `v̂ᵢ = q̂ᵢ*`.
pub fn build_laplacian(n: usize, s: f64, seed: u64) -> Result<DQMatrix> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidSparsity(format!("s = {s} outside (0, 1)")));
    }
    if n < 2 {
        return Err(Error::InvalidSparsity("need at least two vertices".into()));
    }
    let edges_wanted = ((s * (n * n) as f64) / 2.0).floor() as usize;
    let mut pairs: Vec<(usize, usize)> = (0..n - 1)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    if edges_wanted > pairs.len() {
        return Err(Error::InvalidSparsity(format!(
            "{edges_wanted} edges requested but only {} unordered pairs exist",
            pairs.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = pairs.partial_shuffle(&mut rng, edges_wanted);
    let q = gen_unit_dq_vector(n, seed.wrapping_add(1));

    let mut lap = DQMatrix::zeros(n, n);
    let mut degree = vec![0usize; n];
    for &(i, j) in chosen.iter() {
        degree[i] += 1;
        degree[j] += 1;
        let a_ij = q.entries[i].conj() * q.entries[j];
        lap.set(i, j, -a_ij);
        lap.set(j, i, -(a_ij.conj()));
    }
    for (i, &deg) in degree.iter().enumerate() {
        lap.set(i, i, DualQuaternion::real(deg as f64));
    }
    Ok(lap)
}

/// The 5×5 demo matrix: entries `q̂ᵢ* q̂ⱼ` on the edges of a 5-cycle, `i·ε`
/// on the diagonal, zero elsewhere, built from a fixed unit dual quaternion
/// vector. Its standard part has two exactly double eigenvalues, so dual
/// parts are the only thing separating four of the five eigenvalues.
///
/// The stored vector components carry four decimals, which by itself would
/// split the double eigenvalues by ~1e-4 and change the dual parts entirely;
/// each entry is therefore renormalized to an exact unit dual quaternion
/// before the matrix is assembled.
pub fn demo_p5() -> DQMatrix {
    let q = demo_p5_vector();
    let q: Vec<DualQuaternion> = q
        .entries
        .iter()
        .map(|e| {
            let s = e.st / e.st.magnitude();
            DualQuaternion::new(s, e.du - s * s.dot(e.du))
        })
        .collect();
    let edges = [(0usize, 1usize), (1, 2), (2, 3), (3, 4), (4, 0)];
    let mut p = DQMatrix::zeros(5, 5);
    for &(i, j) in &edges {
        let e = q[i].conj() * q[j];
        p.set(i, j, e);
        p.set(j, i, e.conj());
    }
    for i in 0..5 {
        p.du.set(i, i, Quaternion::real((i + 1) as f64));
    }
    p
}

/// The fixed unit dual quaternion vector behind [`demo_p5`] (components
/// printed to four decimals, hence "unit" only to about `1e-3`).
pub fn demo_p5_vector() -> DQVector {
    const ST: [[f64; 4]; 5] = [
        [0.9359, 0.3033, 0.0112, -0.1785],
        [-0.6476, 0.3307, 0.6751, -0.1249],
        [-0.7964, -0.4063, 0.4446, 0.0542],
        [-0.4627, -0.3857, -0.7755, -0.1891],
        [-0.4083, -0.4844, -0.7025, -0.3243],
    ];
    const DU: [[f64; 4]; 5] = [
        [0.0739, -0.9213, -1.0193, -1.2419],
        [-0.2448, -0.0200, -0.3720, -0.7944],
        [-0.3142, 0.0313, -0.5714, 0.3056],
        [0.2159, -0.5179, 0.1159, 0.0530],
        [-0.1260, 0.1389, 0.0662, -0.1923],
    ];
    DQVector {
        entries: (0..5)
            .map(|i| DualQuaternion::new(Quaternion::from(ST[i]), Quaternion::from(DU[i])))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolverKind {
    MaxJacobi,
    Threshold,
    ThreeStep,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::MaxJacobi => write!(f, "max"),
            SolverKind::Threshold => write!(f, "threshold"),
            SolverKind::ThreeStep => write!(f, "3sjacobi"),
        }
    }
}

impl SolverKind {
    pub fn solve(&self, q: &DQMatrix, cfg: &SolverConfig) -> Result<SolveReport> {
        match self {
            SolverKind::MaxJacobi => jacobi_max(q, cfg),
            SolverKind::Threshold => jacobi_threshold(q, cfg),
            SolverKind::ThreeStep => jacobi_three_step(q, cfg),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExperimentKind {
    Random,
    Laplacian,
    DemoP5,
    FromFile(PathBuf),
}

/// One benchmark configuration: which matrices, how many trials, which solver.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    pub sparsity: f64,
    pub seed: u64,
    pub trials: usize,
    pub solver: SolverKind,
    pub cfg: SolverConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        match self.kind {
            ExperimentKind::Laplacian if !(self.sparsity > 0.0 && self.sparsity < 1.0) => {
                Err(Error::InvalidSparsity(format!("s = {}", self.sparsity)))
            }
            ExperimentKind::Random | ExperimentKind::Laplacian if self.n < 2 => {
                Err(Error::ShapeMismatch("n must be at least 2".into()))
            }
            _ => Ok(()),
        }
    }

    fn build_matrix(&self, trial: usize) -> Result<DQMatrix> {
        let seed = self.seed.wrapping_add(trial as u64);
        match &self.kind {
            ExperimentKind::Random => Ok(gen_random_hermitian(self.n, seed)),
            ExperimentKind::Laplacian => build_laplacian(self.n, self.sparsity, seed),
            ExperimentKind::DemoP5 => Ok(demo_p5()),
            ExperimentKind::FromFile(path) => {
                DQMatrix::from_json(&std::fs::read_to_string(path)?)
            }
        }
    }
}

/// Per-trial metrics; `sigma_t`/`sigma_n` stay zero on trial rows and carry
/// the standard deviations on the aggregate row.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricsRow {
    pub trial: usize,
    pub n: usize,
    pub e_lambda: f64,
    pub r_final: f64,
    pub iterations: usize,
    pub cpu_seconds: f64,
    pub sigma_t: f64,
    pub sigma_n: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchSummary {
    pub rows: Vec<MetricsRow>,
    /// Mean metrics with the deviation fields populated; absent when no
    /// trial succeeded.
    pub aggregate: Option<MetricsRow>,
    /// Trials that errored, with the reason; failures do not abort the run.
    pub failures: Vec<(usize, String)>,
}

/// Runs the spec's trials in parallel (one solve per worker, seeds derived
/// per trial) and aggregates the metrics.
pub fn run_bench(spec: &ExperimentSpec) -> Result<BenchSummary> {
    spec.validate()?;
    let outcomes: Vec<(usize, Result<MetricsRow>)> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let run = || -> Result<MetricsRow> {
                let q = spec.build_matrix(trial)?;
                let start = Instant::now();
                let report = spec.solver.solve(&q, &spec.cfg)?;
                let cpu_seconds = start.elapsed().as_secs_f64();
                Ok(MetricsRow {
                    trial,
                    n: q.rows(),
                    e_lambda: metric_elambda(&q, &report)?,
                    r_final: report.final_r(),
                    iterations: report.iterations,
                    cpu_seconds,
                    sigma_t: 0.0,
                    sigma_n: 0.0,
                })
            };
            (trial, run())
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((trial, e.to_string())),
        }
    }

    let aggregate = if rows.is_empty() {
        None
    } else {
        let m = rows.len() as f64;
        let mean = |f: &dyn Fn(&MetricsRow) -> f64| rows.iter().map(f).sum::<f64>() / m;
        let stddev = |f: &dyn Fn(&MetricsRow) -> f64, mu: f64| {
            if rows.len() < 2 {
                0.0
            } else {
                (rows.iter().map(|r| (f(r) - mu).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
            }
        };
        let mean_t = mean(&|r| r.cpu_seconds);
        let mean_n = mean(&|r| r.iterations as f64);
        Some(MetricsRow {
            trial: rows.len(),
            n: rows[0].n,
            e_lambda: mean(&|r| r.e_lambda),
            r_final: mean(&|r| r.r_final),
            iterations: mean_n.round() as usize,
            cpu_seconds: mean_t,
            sigma_t: stddev(&|r| r.cpu_seconds, mean_t),
            sigma_n: stddev(&|r| r.iterations as f64, mean_n),
        })
    };
    Ok(BenchSummary { rows, aggregate, failures })
}

impl BenchSummary {
    fn csv_rows(&self, label: &str) -> String {
        let mut csv = String::new();
        for r in &self.rows {
            csv.push_str(&format!(
                "{label},trial,{},{},{:e},{:e},{},{:.6},0,0\n",
                r.trial, r.n, r.e_lambda, r.r_final, r.iterations, r.cpu_seconds
            ));
        }
        if let Some(a) = &self.aggregate {
            csv.push_str(&format!(
                "{label},mean,{},{},{:e},{:e},{},{:.6},{:e},{:e}\n",
                a.trial, a.n, a.e_lambda, a.r_final, a.iterations, a.cpu_seconds, a.sigma_t, a.sigma_n
            ));
        }
        csv
    }

    fn jsonl_rows(&self, label: &str) -> String {
        let mut jsonl = String::new();
        for r in &self.rows {
            jsonl.push_str(&serde_json::json!({"label": label, "row": "trial", "metrics": r}).to_string());
            jsonl.push('\n');
        }
        if let Some(a) = &self.aggregate {
            jsonl.push_str(&serde_json::json!({"label": label, "row": "mean", "metrics": a}).to_string());
            jsonl.push('\n');
        }
        for (trial, err) in &self.failures {
            jsonl.push_str(
                &serde_json::json!({"label": label, "row": "failure", "trial": trial, "error": err})
                    .to_string(),
            );
            jsonl.push('\n');
        }
        jsonl
    }

    /// Writes `<stem>.csv` and `<stem>.jsonl`; any `.csv`/`.json`/`.jsonl`
    /// extension on the given path is stripped first.
    pub fn save(&self, path: &Path, label: &str) -> Result<(PathBuf, PathBuf)> {
        save_bench_reports(path, &[(label.to_string(), self.clone())])
    }
}

/// Writes several labeled summaries into one `<stem>.csv` / `<stem>.jsonl`
/// pair; returns the two paths written.
pub fn save_bench_reports(
    path: &Path,
    summaries: &[(String, BenchSummary)],
) -> Result<(PathBuf, PathBuf)> {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") | Some("json") | Some("jsonl") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    if let Some(parent) = stem.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let csv_path = stem.with_extension("csv");
    let jsonl_path = stem.with_extension("jsonl");

    let mut csv =
        String::from("label,row,trial,n,e_lambda,r_final,iterations,cpu_seconds,sigma_t,sigma_n\n");
    let mut jsonl = String::new();
    for (label, summary) in summaries {
        csv.push_str(&summary.csv_rows(label));
        jsonl.push_str(&summary.jsonl_rows(label));
    }
    std::fs::write(&csv_path, csv)?;
    std::fs::write(&jsonl_path, jsonl)?;
    Ok((csv_path, jsonl_path))
}
