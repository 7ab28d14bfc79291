//! The three Jacobi-type eigensolvers with termination bounds and tracing.
//!
//! All solvers share one contract: the input must be Hermitian, the output
//! lists all `n` dual-number eigenvalues sorted descending in the dual order
//! together with the accumulated unitary eigenvector matrix, and a
//! per-iteration trace records the convergence metric `R`, the off-diagonal
//! measures of both parts, and timing.
//!
//! * [`jacobi_max`] eliminates the largest standard-part off-diagonal entry
//!   each iteration and finishes with the near-diagonal eigenvector
//!   correction. It assumes simple standard eigenvalues; (near-)repeated ones
//!   surface as [`SolveStatus::DegenerateSpectrumWarning`].
//! * [`jacobi_threshold`] sweeps row-major and eliminates every entry above a
//!   geometrically shrinking threshold `δ·ρ^(t−1)` until the level drops
//!   below the floor `η`; same final correction and caveats.
//! * [`jacobi_three_step`] first diagonalizes the standard part alone, then
//!   decouples dual entries across well-separated diagonal blocks (gap > γ),
//!   then runs threshold sweeps on the dual part inside each block. This
//!   handles eigenvalues with identical standard parts but distinct dual
//!   parts, which the other two cannot.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::dual::DualNumber;
use crate::dualquat::DualQuaternion;
use crate::error::{Error, Result};
use crate::givens::{apply_dual_decoupling, apply_dual_givens, apply_standard_rotation, diag2_standard, plan_dual};
use crate::matrix::DQMatrix;
use crate::ZERO_TOL;

/// Iteration parameters; the defaults mirror the desk-scale experiment
/// settings (`ε = η = 1e-7`, `δ = δ₁ = 1`, `ρ² = 0.1`, `S = 2`).
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Accuracy floor for max-element iteration.
    pub eps: f64,
    /// Initial threshold for standard-part sweeps.
    pub delta: f64,
    /// Initial threshold for dual-part sweeps (three-step only).
    pub delta1: f64,
    /// Threshold decay factor in (0, 1).
    pub rho: f64,
    /// Terminal threshold floor.
    pub eta: f64,
    /// How many times the decoupling pass (STEP 2) repeats.
    pub s_repeats: usize,
    /// Overrides the block-grouping threshold `γ = sqrt(2n(n−1))·η`.
    pub gamma_override: Option<f64>,
    /// Apply a final cross-block eigenvector correction after STEP 3.
    pub post_correct: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 1e-7,
            delta: 1.0,
            delta1: 1.0,
            rho: 0.1f64.sqrt(),
            eta: 1e-7,
            s_repeats: 2,
            gamma_override: None,
            post_correct: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.delta > 0.0 && self.delta1 > 0.0 && self.eta > 0.0) {
            return Err(Error::InvalidConfig("eps, delta, delta1, eta must be positive".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidConfig("rho must lie in (0, 1)".into()));
        }
        if self.s_repeats == 0 {
            return Err(Error::InvalidConfig("s_repeats must be at least 1".into()));
        }
        if let Some(g) = self.gamma_override {
            if g <= 0.0 {
                return Err(Error::InvalidConfig("gamma override must be positive".into()));
            }
        }
        Ok(())
    }

    /// Block-grouping threshold for a given matrix size.
    pub fn gamma(&self, n: usize) -> f64 {
        self.gamma_override
            .unwrap_or_else(|| (2.0 * (n * n.saturating_sub(1)) as f64).sqrt() * self.eta)
    }
}

/// Adaptive repeat count for the decoupling pass:
/// `S = ceil(log₁₀(‖Q_du‖_F / (n·η)))`, at least 1.
pub fn adaptive_s_repeats(q: &DQMatrix, eta: f64) -> usize {
    let f = q.du.fnorm();
    let n = q.rows() as f64;
    if f <= 0.0 {
        return 1;
    }
    (f / (n * eta)).log10().ceil().max(1.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Converged,
    /// The run finished but (near-)repeated standard eigenvalues prevented a
    /// clean eigenvector correction or stalled the max-element iteration.
    DegenerateSpectrumWarning,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// `sqrt(N_st + N_du) / ‖Q⁰‖_Fᴿ`.
    pub r_metric: f64,
    pub n_st: f64,
    pub n_du: f64,
    /// For max-element iteration the global maximum; for threshold sweeps the
    /// magnitude of the entry eliminated at this iteration.
    pub max_offdiag: f64,
    pub elapsed_ms: f64,
}

/// Off-diagonal state recorded when a threshold level finishes its sweeps.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LevelCheckpoint {
    pub delta: f64,
    pub iteration: usize,
    pub n_st: f64,
    pub n_du: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// All eigenvalues, sorted descending in the dual order. Standard parts
    /// are compared with a tolerance at the solver's degeneracy scale so that
    /// numerically tied values order by their dual parts.
    pub eigenvalues: Vec<DualNumber>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: DQMatrix,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    /// Worst-case iteration bound for the algorithm that produced the report.
    pub bound_t: f64,
    pub status: SolveStatus,
    /// `‖Q⁰‖_Fᴿ` of the input, the reference scale for `R`.
    pub initial_frnorm: f64,
    pub final_offdiag_st: f64,
    pub final_offdiag_du: f64,
    pub level_checkpoints: Vec<LevelCheckpoint>,
    /// Realized decoupling sums (three-step only): `α = Σ 2/|gap|` and
    /// `β = Π(1 + 2η/|gap|)` over the first decoupling pass.
    pub realized_alpha: Option<f64>,
    pub realized_beta: Option<f64>,
    pub elapsed_ms: f64,
}

impl SolveReport {
    /// Final convergence metric `R` (last trace row).
    pub fn final_r(&self) -> f64 {
        self.trace.last().map(|t| t.r_metric).unwrap_or(0.0)
    }

    /// Writes the trace as CSV: `iteration,r,n_st,n_du,max_offdiag,elapsed_ms`.
    pub fn trace_to_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iteration,r,n_st,n_du,max_offdiag,elapsed_ms")?;
        for row in &self.trace {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:.3}",
                row.iteration, row.r_metric, row.n_st, row.n_du, row.max_offdiag, row.elapsed_ms
            )?;
        }
        Ok(())
    }
}

/// Working state shared by the three algorithms. The off-diagonal measures
/// are maintained incrementally: a rotation touches only rows/columns `k, l`,
/// so the measures are corrected by the difference over those entries rather
/// than recomputed at `O(n²)` per iteration.
struct State {
    q: DQMatrix,
    acc: DQMatrix,
    n: usize,
    n_st: f64,
    n_du: f64,
    d_ref: f64,
    start: Instant,
    trace: Vec<TraceRow>,
    iterations: usize,
    checkpoints: Vec<LevelCheckpoint>,
}

impl State {
    fn new(q0: &DQMatrix) -> Result<State> {
        if !q0.is_square() || q0.rows() == 0 {
            return Err(Error::ShapeMismatch("solver needs a nonempty square matrix".into()));
        }
        if !q0.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let (n_st, n_du) = q0.offdiag_measure()?;
        let n = q0.rows();
        let mut st = State {
            q: q0.clone(),
            acc: DQMatrix::identity(n),
            n,
            n_st,
            n_du,
            d_ref: q0.frnorm().max(f64::MIN_POSITIVE),
            start: Instant::now(),
            trace: Vec::new(),
            iterations: 0,
            checkpoints: Vec::new(),
        };
        let m0 = st.q.st.max_offdiag().0;
        st.record(m0);
        Ok(st)
    }

    fn r_metric(&self) -> f64 {
        (self.n_st.max(0.0) + self.n_du.max(0.0)).sqrt() / self.d_ref
    }

    fn record(&mut self, max_offdiag: f64) {
        self.trace.push(TraceRow {
            iteration: self.iterations,
            r_metric: self.r_metric(),
            n_st: self.n_st.max(0.0),
            n_du: self.n_du.max(0.0),
            max_offdiag,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn checkpoint(&mut self, delta: f64) {
        self.checkpoints.push(LevelCheckpoint {
            delta,
            iteration: self.iterations,
            n_st: self.n_st.max(0.0),
            n_du: self.n_du.max(0.0),
        });
    }

    /// Squared off-diagonal mass of both parts restricted to the entries a
    /// rotation at `(k, l)` can change.
    fn cross_sqsum(&self, k: usize, l: usize) -> (f64, f64) {
        let mut st = 0.0;
        let mut du = 0.0;
        for j in 0..self.n {
            if j != k {
                st += self.q.st.get(k, j).norm_sqr();
                du += self.q.du.get(k, j).norm_sqr();
            }
            if j != l {
                st += self.q.st.get(l, j).norm_sqr();
                du += self.q.du.get(l, j).norm_sqr();
            }
        }
        for i in 0..self.n {
            if i != k && i != l {
                st += self.q.st.get(i, k).norm_sqr() + self.q.st.get(i, l).norm_sqr();
                du += self.q.du.get(i, k).norm_sqr() + self.q.du.get(i, l).norm_sqr();
            }
        }
        (st, du)
    }

    fn apply_counted(
        &mut self,
        k: usize,
        l: usize,
        pivot: f64,
        f: impl FnOnce(&mut DQMatrix, &mut DQMatrix) -> Result<()>,
    ) -> Result<()> {
        let before = self.cross_sqsum(k, l);
        f(&mut self.q, &mut self.acc)?;
        let after = self.cross_sqsum(k, l);
        self.n_st += after.0 - before.0;
        self.n_du += after.1 - before.1;
        self.iterations += 1;
        self.record(pivot);
        Ok(())
    }

    /// Full dual Givens elimination at `(k, l)`.
    fn rotate_dual(&mut self, k: usize, l: usize, pivot: f64) -> Result<()> {
        let plan = plan_dual(&self.q, k, l)?;
        self.apply_counted(k, l, pivot, |q, acc| apply_dual_givens(q, &plan, acc))
    }

    /// Standard-part rotation (both parts transformed by the same real
    /// unitary); the kernel reads from the standard part when `from_dual` is
    /// false and from the dual part otherwise.
    fn rotate_standard(&mut self, k: usize, l: usize, from_dual: bool, pivot: f64) -> Result<()> {
        let src = if from_dual { &self.q.du } else { &self.q.st };
        let plan = diag2_standard(src.get(k, k).w, src.get(l, l).w, src.get(k, l))?.at(k, l);
        self.apply_counted(k, l, pivot, |q, acc| apply_standard_rotation(q, &plan, acc))
    }

    fn rotate_decouple(&mut self, k: usize, l: usize, min_gap: f64, pivot: f64) -> Result<()> {
        self.apply_counted(k, l, pivot, |q, acc| apply_dual_decoupling(q, k, l, acc, min_gap))
    }

    /// Threshold cascade over the given pairs: eliminate everything at or
    /// above the level, repeat until a pass stays clean, then lower the
    /// level by `rho` until it crosses `eta`.
    ///
    /// The rotation sequence is exactly the naive row-major schedule; the
    /// only shortcuts are scan-side. A clean pass knows the true maximum of
    /// the surviving entries, so levels above that maximum are provably empty
    /// and skipped without rescanning, and comparisons use squared
    /// magnitudes to avoid a square root per visit.
    fn threshold_cascade(
        &mut self,
        kind: SweepKind,
        pairs: &[(usize, usize)],
        delta0: f64,
        rho: f64,
        eta: f64,
    ) -> Result<()> {
        let mut level = delta0;
        let mut max_known = f64::INFINITY;
        while level >= eta {
            if max_known >= level {
                loop {
                    let mut any = false;
                    let mut survivors_sq: f64 = 0.0;
                    let level_sq = level * level;
                    for &(k, l) in pairs {
                        let m_sq = match kind {
                            SweepKind::StandardPart | SweepKind::FullDual => {
                                self.q.st.get(k, l).norm_sqr()
                            }
                            SweepKind::DualPart => self.q.du.get(k, l).norm_sqr(),
                        };
                        if m_sq >= level_sq && m_sq > ZERO_TOL * ZERO_TOL {
                            let pivot = m_sq.sqrt();
                            match kind {
                                SweepKind::FullDual => self.rotate_dual(k, l, pivot)?,
                                SweepKind::StandardPart => {
                                    self.rotate_standard(k, l, false, pivot)?
                                }
                                SweepKind::DualPart => self.rotate_standard(k, l, true, pivot)?,
                            }
                            any = true;
                        } else if m_sq > survivors_sq {
                            survivors_sq = m_sq;
                        }
                    }
                    if !any {
                        max_known = survivors_sq.sqrt();
                        break;
                    }
                }
            }
            if !pairs.is_empty() {
                self.checkpoint(level);
            }
            level *= rho;
        }
        Ok(())
    }

    fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.q.st.get(i, i).w).collect()
    }

    fn finish(
        mut self,
        status: SolveStatus,
        bound_t: f64,
        tie_tol: f64,
        realized: Option<(f64, f64)>,
    ) -> SolveReport {
        let n = self.n;
        let eigenvalues: Vec<DualNumber> = (0..n)
            .map(|i| DualNumber::new(self.q.st.get(i, i).w, self.q.du.get(i, i).w))
            .collect();

        canonicalize_phases(&mut self.acc);
        let order = descending_order(&eigenvalues, tie_tol);
        let eigenvectors = DQMatrix::from_fn(n, n, |i, j| self.acc.get(i, order[j]));
        let eigenvalues: Vec<DualNumber> = order.iter().map(|&i| eigenvalues[i]).collect();

        let mut final_st: f64 = 0.0;
        let mut final_du: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    final_st = final_st.max(self.q.st.get(i, j).magnitude());
                    final_du = final_du.max(self.q.du.get(i, j).magnitude());
                }
            }
        }

        SolveReport {
            eigenvalues,
            eigenvectors,
            trace: self.trace,
            iterations: self.iterations,
            bound_t,
            status,
            initial_frnorm: self.d_ref,
            final_offdiag_st: final_st,
            final_offdiag_du: final_du,
            level_checkpoints: self.checkpoints,
            realized_alpha: realized.map(|r| r.0),
            realized_beta: realized.map(|r| r.1),
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// Which matrix part a threshold sweep reads and which rotation it applies.
#[derive(Clone, Copy, PartialEq, Eq)]
enum SweepKind {
    /// Standard-part pivots, full dual Givens rotations (threshold solver).
    FullDual,
    /// Standard-part pivots, real rotations on both parts (STEP 1).
    StandardPart,
    /// Dual-part pivots, real rotations on both parts (STEP 3).
    DualPart,
}

/// Descending dual order with a tolerance on the standard parts: values whose
/// standard parts chain within `tie_tol` count as tied and are ordered by
/// their dual parts. A strict lexicographic sort would let floating-point
/// noise in (numerically) repeated standard parts scramble the dual-part
/// order, which is exactly the regime the three-step algorithm exists for.
fn descending_order(values: &[DualNumber], tie_tol: f64) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[b].st.total_cmp(&values[a].st));
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for i in 1..=n {
        let block_ends =
            i == n || (values[idx[i - 1]].st - values[idx[i]].st).abs() > tie_tol;
        if block_ends {
            let mut block = idx[start..i].to_vec();
            block.sort_by(|&a, &b| values[b].du.total_cmp(&values[a].du));
            out.extend(block);
            start = i;
        }
    }
    out
}

/// Right-multiplies every column by the conjugate phase of its largest
/// standard-part component, making the reported eigenvectors deterministic
/// and invariant under positive rescaling of the input.
fn canonicalize_phases(acc: &mut DQMatrix) {
    let n = acc.rows();
    for j in 0..n {
        let m = (0..n)
            .max_by(|&a, &b| acc.st.get(a, j).norm_sqr().total_cmp(&acc.st.get(b, j).norm_sqr()))
            .expect("nonempty column");
        let lead = acc.st.get(m, j);
        let mag = lead.magnitude();
        if mag <= ZERO_TOL {
            continue;
        }
        let phase = DualQuaternion::standard(lead.conj() / mag);
        for i in 0..n {
            acc.set(i, j, acc.get(i, j) * phase);
        }
    }
}

/// Near-diagonal eigenvector correction: for a matrix whose standard part is
/// diagonal (to tolerance) with pairwise distinct diagonal, the matrix
/// `V = I + Dε`, `D_rc = (Q_du)_rc / (d_c − d_r)`, makes the columns exact
/// eigenvectors. Pairs with `|d_c − d_r| < gap_tol` fail with
/// [`Error::RepeatedDiagonal`].
pub fn eigvecs_correction(qnear: &DQMatrix, gap_tol: f64) -> Result<DQMatrix> {
    let (v, degenerate) = near_diagonal_correction(qnear, gap_tol);
    if degenerate {
        return Err(Error::RepeatedDiagonal);
    }
    Ok(v)
}

/// Lenient variant used by the solvers: entries whose gap falls below
/// `gap_tol` are skipped and reported through the flag.
fn near_diagonal_correction(q: &DQMatrix, gap_tol: f64) -> (DQMatrix, bool) {
    let n = q.rows();
    let diag: Vec<f64> = (0..n).map(|i| q.st.get(i, i).w).collect();
    let mut v = DQMatrix::identity(n);
    let mut degenerate = false;
    for r in 0..n {
        for c in 0..n {
            if r == c {
                continue;
            }
            let gap = diag[c] - diag[r];
            if gap.abs() < gap_tol {
                degenerate = true;
                continue;
            }
            v.du.set(r, c, q.du.get(r, c) / gap);
        }
    }
    (v, degenerate)
}

/// Worst-case iteration count for max-element elimination:
/// `ceil(log(ε / N(Q_st⁰)) / log(1 − 2/(n(n−1))))`.
pub fn alg1_iteration_bound(n: usize, eps: f64, n_st0: f64) -> f64 {
    if n_st0 <= eps || n <= 1 {
        return 0.0;
    }
    if n == 2 {
        // one rotation diagonalizes; the log ratio degenerates here
        return 1.0;
    }
    let delta = 1.0 - 2.0 / ((n * (n - 1)) as f64);
    ((eps / n_st0).ln() / delta.ln()).ceil()
}

/// Worst-case sweep-phase iteration count for one threshold cascade:
/// `‖Q_st‖_F²/(2δ²) + (n²/(2ρ²))·⌈log_ρ(η/δ)⌉`.
pub fn threshold_iteration_bound(st_fnorm: f64, n: usize, delta: f64, rho: f64, eta: f64) -> f64 {
    let levels = ((eta / delta).ln() / rho.ln()).ceil().max(0.0);
    st_fnorm * st_fnorm / (2.0 * delta * delta)
        + (n * n) as f64 / (2.0 * rho * rho) * levels
}

/// Worst-case iteration count of the three-step algorithm with `S` decoupling
/// passes, given the decoupling sums `α`, `β` and `h₂ = Σ tᵢ²` over the
/// standard multiplicities.
#[allow(clippy::too_many_arguments)]
pub fn three_step_iteration_bound(
    st_fnorm: f64,
    du_fnorm: f64,
    n: usize,
    delta: f64,
    delta1: f64,
    rho: f64,
    eta: f64,
    s_repeats: usize,
    h2: f64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let abh = alpha * beta * eta;
    let kappa_s = if (1.0 - abh).abs() < 1e-12 {
        (s_repeats + 1) as f64
    } else {
        (1.0 - abh.powi(s_repeats as i32 + 1)) / (1.0 - abh)
    };
    let levels = |d: f64| ((eta / d).ln() / rho.ln()).ceil().max(0.0);
    st_fnorm * st_fnorm / (2.0 * delta * delta)
        + (n * n) as f64 / 2.0 * (s_repeats as f64 + levels(delta) / (rho * rho))
        + h2 / 2.0
            * (kappa_s * kappa_s * du_fnorm * du_fnorm / (delta1 * delta1)
                + levels(delta1) / (rho * rho))
}

/// A-priori iteration bounds `(T_alg1, T_3step)` for a matrix whose standard
/// spectrum has the given multiplicities (ordered by descending eigenvalue).
/// The three-step bound uses the envelope `α ≤ n(n−1)/(c−γ)`,
/// `β ≤ (1 + 2η/(c−γ))^{n(n−1)/2}` with `c` the smallest gap between distinct
/// standard eigenvalues, measured through the embedding oracle.
pub fn iteration_bounds(
    q: &DQMatrix,
    cfg: &SolverConfig,
    multiplicities: &[usize],
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let n = q.rows();
    if multiplicities.is_empty() || multiplicities.contains(&0) {
        return Err(Error::InvalidMultiplicities("entries must be positive".into()));
    }
    if multiplicities.iter().sum::<usize>() != n {
        return Err(Error::InvalidMultiplicities(format!(
            "sum {} != n = {n}",
            multiplicities.iter().sum::<usize>()
        )));
    }
    let (n_st0, _) = q.offdiag_measure()?;
    let t1 = alg1_iteration_bound(n, cfg.eps, n_st0);

    if multiplicities.len() == 1 {
        // single eigenvalue group: no decoupling happens at all
        let h2 = (n * n) as f64;
        let t3 = three_step_iteration_bound(
            q.st.fnorm(), q.du.fnorm(), n, cfg.delta, cfg.delta1, cfg.rho, cfg.eta,
            cfg.s_repeats, h2, 0.0, 1.0,
        );
        return Ok((t1, t3));
    }

    let eigs = crate::oracle::standard_eigs_oracle(&q.st)?;
    let mut reps = Vec::with_capacity(multiplicities.len());
    let mut pos = 0;
    for &t in multiplicities {
        let group = &eigs[pos..pos + t];
        reps.push(group.iter().sum::<f64>() / t as f64);
        pos += t;
    }
    let c = reps
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min);
    let gamma = cfg.gamma(n);
    if c <= gamma {
        return Err(Error::DegenerateSpectrum);
    }
    let nn = (n * (n - 1)) as f64;
    let alpha = nn / (c - gamma);
    let beta = (1.0 + 2.0 * cfg.eta / (c - gamma)).powf(nn / 2.0);
    let h2 = multiplicities.iter().map(|&t| (t * t) as f64).sum::<f64>();
    let t3 = three_step_iteration_bound(
        q.st.fnorm(), q.du.fnorm(), n, cfg.delta, cfg.delta1, cfg.rho, cfg.eta,
        cfg.s_repeats, h2, alpha, beta,
    );
    Ok((t1, t3))
}

/// Max-element Jacobi iteration with the near-diagonal eigenvector
/// correction appended after convergence.
pub fn jacobi_max(q0: &DQMatrix, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let mut state = State::new(q0)?;
    let n = state.n;
    let bound = alg1_iteration_bound(n, cfg.eps, state.n_st);

    let mut status = SolveStatus::Converged;
    let mut r_ref = f64::INFINITY;
    let mut stall = 0usize;
    loop {
        let (r, k, l) = state.q.st.max_offdiag();
        if r < cfg.eps || r <= ZERO_TOL {
            break;
        }
        if r < r_ref {
            r_ref = r;
            stall = 0;
        } else {
            stall += 1;
            if stall >= n * n {
                // only reachable with degenerate spectra; bail out rather than spin
                status = SolveStatus::DegenerateSpectrumWarning;
                break;
            }
        }
        state.rotate_dual(k, l, r)?;
    }

    let gap_tol = ((n * n.saturating_sub(1)) as f64).sqrt() * cfg.eps;
    let (v, degenerate) = near_diagonal_correction(&state.q, gap_tol);
    state.acc = state.acc.matmul(&v)?;
    if degenerate {
        status = SolveStatus::DegenerateSpectrumWarning;
    }
    Ok(state.finish(status, bound, gap_tol, None))
}

/// Threshold-accelerated Jacobi: eliminates every standard-part entry at or
/// above `δ·ρ^(t−1)`, lowering the threshold until it crosses `η`.
pub fn jacobi_threshold(q0: &DQMatrix, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let mut state = State::new(q0)?;
    let n = state.n;
    let bound = threshold_iteration_bound(q0.st.fnorm(), n, cfg.delta, cfg.rho, cfg.eta);

    let pairs = all_pairs(n);
    state.threshold_cascade(SweepKind::FullDual, &pairs, cfg.delta, cfg.rho, cfg.eta)?;

    let gap_tol = ((n * n.saturating_sub(1)) as f64).sqrt() * cfg.eta;
    let (v, degenerate) = near_diagonal_correction(&state.q, gap_tol);
    state.acc = state.acc.matmul(&v)?;
    let status = if degenerate {
        SolveStatus::DegenerateSpectrumWarning
    } else {
        SolveStatus::Converged
    };
    Ok(state.finish(status, bound, gap_tol, None))
}

/// Three-step Jacobi: standard-part threshold diagonalization, `S` passes of
/// cross-block dual decoupling over pairs whose cached diagonal gap exceeds
/// `γ`, then dual-part threshold sweeps inside the blocks. Block membership
/// is decided once, on the diagonal cached at the end of STEP 1.
pub fn jacobi_three_step(q0: &DQMatrix, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let mut state = State::new(q0)?;
    let n = state.n;
    let gamma = cfg.gamma(n);

    // STEP 1: diagonalize the standard part
    state.threshold_cascade(SweepKind::StandardPart, &all_pairs(n), cfg.delta, cfg.rho, cfg.eta)?;
    let diag_cache = state.diag();

    // STEP 2: decouple dual entries across separated blocks; identity
    // rotations (zero dual entry) are skipped.
    let mut alpha = 0.0;
    let mut beta = 1.0;
    for pass in 0..cfg.s_repeats {
        for i in 0..n - 1 {
            for j in (i + 1)..n {
                let gap = (diag_cache[i] - diag_cache[j]).abs();
                if gap > gamma {
                    if pass == 0 {
                        let r_m = 2.0 / gap;
                        alpha += r_m;
                        beta *= 1.0 + r_m * cfg.eta;
                    }
                    let pivot = state.q.du.get(i, j).magnitude();
                    if pivot <= ZERO_TOL {
                        continue;
                    }
                    state.rotate_decouple(i, j, gamma, pivot)?;
                }
            }
        }
    }

    // STEP 3: diagonalize the dual part inside each block
    let pairs: Vec<(usize, usize)> = all_pairs(n)
        .into_iter()
        .filter(|&(i, j)| (diag_cache[i] - diag_cache[j]).abs() <= gamma)
        .collect();
    state.threshold_cascade(SweepKind::DualPart, &pairs, cfg.delta1, cfg.rho, cfg.eta)?;

    if cfg.post_correct {
        // cross-block first-order eigenvector correction; within-block pairs
        // are left to the STEP 3 rotations that already handled them
        let diag_now = state.diag();
        let mut v = DQMatrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                if r == c {
                    continue;
                }
                let gap = diag_now[c] - diag_now[r];
                if gap.abs() > gamma {
                    v.du.set(r, c, state.q.du.get(r, c) / gap);
                }
            }
        }
        state.acc = state.acc.matmul(&v)?;
    }

    let blocks = block_sizes(&diag_cache, gamma);
    let h2 = blocks.iter().map(|&t| (t * t) as f64).sum::<f64>();
    let bound = three_step_iteration_bound(
        q0.st.fnorm(), q0.du.fnorm(), n, cfg.delta, cfg.delta1, cfg.rho, cfg.eta,
        cfg.s_repeats, h2, alpha, beta,
    );
    Ok(state.finish(SolveStatus::Converged, bound, gamma, Some((alpha, beta))))
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n.saturating_sub(1))
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

/// Groups a diagonal into blocks by chaining gaps of at most `gamma` over the
/// sorted values; returns the block sizes.
fn block_sizes(diag: &[f64], gamma: f64) -> Vec<usize> {
    let mut sorted = diag.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut sizes = Vec::new();
    let mut current = 1usize;
    for w in sorted.windows(2) {
        if (w[0] - w[1]).abs() <= gamma {
            current += 1;
        } else {
            sizes.push(current);
            current = 1;
        }
    }
    sizes.push(current);
    sizes
}
