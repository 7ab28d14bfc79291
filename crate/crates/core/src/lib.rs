//! Eigensolvers for dual quaternion Hermitian matrices.
//!
//! A dual quaternion is `q_st + q_du ε` with quaternion parts and `ε² = 0`.
//! Hermitian matrices over this ring have exactly `n` dual-number eigenvalues,
//! and this crate computes all of them (plus eigenvectors) with three
//! Jacobi-type iterations built from 2×2 Givens kernels:
//!
//! * [`jacobi_max`] — classic max-element pivoting,
//! * [`jacobi_threshold`] — threshold sweeps with a geometric schedule,
//! * [`jacobi_three_step`] — standard-part diagonalization, cross-block dual
//!   decoupling, then within-block dual diagonalization; this is the variant
//!   that handles eigenvalues with identical standard parts but distinct dual
//!   parts.
//!
//! The [`oracle`] module verifies results through an independent route: the
//! complex-adjoint embedding of quaternion matrices solved by a classical
//! cyclic Jacobi iteration that shares no code with the solvers above.
//! [`experiments`] holds seeded generators (random Hermitian matrices, unit
//! dual quaternion vectors, graph Laplacians), the accuracy metrics, and the
//! benchmark runner used by the CLI.

pub mod dual;
pub mod dualquat;
pub mod error;
pub mod experiments;
pub mod givens;
pub mod matrix;
pub mod oracle;
pub mod quaternion;
pub mod solver;

pub use dual::DualNumber;
pub use dualquat::DualQuaternion;
pub use error::{Error, Result};
pub use experiments::{
    build_laplacian, demo_p5, demo_p5_vector, gen_random_hermitian, gen_unit_dq_vector,
    metric_elambda, metric_r, run_bench, save_bench_reports, BenchSummary, ExperimentKind,
    ExperimentSpec, MetricsRow, SolverKind,
};
pub use givens::{
    apply_dual_decoupling, apply_dual_givens, apply_standard_rotation, diag2_dual, diag2_standard,
    GivensPlan,
};
pub use matrix::{hw_check, DQMatrix, DQVector, QMatrix};
pub use oracle::{complex_adjoint, dual_eigs_oracle, standard_eigs_oracle, ComplexHermitian};
pub use quaternion::Quaternion;
pub use solver::{
    eigvecs_correction, iteration_bounds, jacobi_max, jacobi_three_step, jacobi_threshold,
    LevelCheckpoint, SolveReport, SolveStatus, SolverConfig, TraceRow,
};

/// Absolute tolerance below which a floating-point quantity counts as zero
/// when a definition branches on "= 0" (appreciability tests, division guards).
pub const ZERO_TOL: f64 = 1e-14;
