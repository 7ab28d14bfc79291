//! 2×2 diagonalization kernels and their n×n rotation embeddings.
//!
//! For a quaternion Hermitian block `[[a, c], [c*, b]]` with `c ≠ 0`, the
//! eigenvalues are the roots of `(a−x)(b−x) = |c|²` and the unitary
//!
//! ```text
//!        ⎡ −c/n₁          −c/n₂        ⎤
//!   U =  ⎢                             ⎥ ,   nₖ = ((a−λₖ)² + |c|²)^½
//!        ⎣ (a−λ₁)/n₁      (a−λ₂)/n₂   ⎦
//! ```
//!
//! diagonalizes it. For a dual quaternion Hermitian block the same `U` handles
//! the standard part and a first-order corrector `V = I + Dε` with
//! `D₀₁ = ẑ/(λ₂−λ₁)`, `D₁₀ = ẑ*/(λ₁−λ₂)` (where `ẑ` is the rotated dual
//! off-diagonal) finishes the job, so `U·V` diagonalizes the block exactly to
//! first order. Embedding either factor at positions `(k, l)` of the identity
//! gives the rotations used by all three solvers; applications touch only
//! rows and columns `k, l`, which is algebraically identical to the full
//! triple product.

use crate::dualquat::DualQuaternion;
use crate::error::{Error, Result};
use crate::matrix::DQMatrix;
use crate::matrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::ZERO_TOL;

/// A planned 2×2 rotation at positions `(k, l)`.
///
/// `u` is the row-major standard-part unitary `[u_kk, u_kl, u_lk, u_ll]`.
/// `v_offdiag` holds the dual corrector entries `(D_kl, D_lk)` when the plan
/// was built dual-aware; `x` and `y` are the dual diagonal values the
/// rotation produces.
#[derive(Clone, Debug)]
pub struct GivensPlan {
    pub k: usize,
    pub l: usize,
    pub u: [Quaternion; 4],
    pub lambda1: f64,
    pub lambda2: f64,
    pub v_offdiag: Option<(Quaternion, Quaternion)>,
    pub x: f64,
    pub y: f64,
}

impl GivensPlan {
    /// Rebases the plan onto positions `(k, l)` of a larger matrix.
    pub fn at(mut self, k: usize, l: usize) -> Self {
        self.k = k;
        self.l = l;
        self
    }

    /// The 2×2 dual quaternion block this plan applies, row-major.
    pub fn block(&self) -> [DualQuaternion; 4] {
        match self.v_offdiag {
            None => [
                DualQuaternion::standard(self.u[0]),
                DualQuaternion::standard(self.u[1]),
                DualQuaternion::standard(self.u[2]),
                DualQuaternion::standard(self.u[3]),
            ],
            // U·(I + Dε): standard part U, dual part U·D
            Some((dkl, dlk)) => [
                DualQuaternion::new(self.u[0], self.u[1] * dlk),
                DualQuaternion::new(self.u[1], self.u[0] * dkl),
                DualQuaternion::new(self.u[2], self.u[3] * dlk),
                DualQuaternion::new(self.u[3], self.u[2] * dkl),
            ],
        }
    }
}

/// Solves the quaternion Hermitian 2×2 `[[a, c], [c*, b]]`.
///
/// Roots are ordered `lambda1 > lambda2` (strict whenever `|c| > 0`); the
/// `a−λ` terms are formed cancellation-free from whichever of the two
/// algebraically equivalent expressions is well conditioned, and the columns
/// are renormalized once after formation.
pub fn diag2_standard(a: f64, b: f64, c: Quaternion) -> Result<GivensPlan> {
    let csq = c.norm_sqr();
    if csq.sqrt() <= ZERO_TOL {
        return Err(Error::DegenerateOffdiag);
    }
    let s = ((a - b) * (a - b) + 4.0 * csq).sqrt();
    let lambda1 = 0.5 * ((a + b) + s);
    let lambda2 = 0.5 * ((a + b) - s);
    // (a−λ₁)(a−λ₂) = −|c|², so the small factor follows from the large one
    let (a_m_l1, a_m_l2) = if a - b >= 0.0 {
        let big = 0.5 * ((a - b) + s);
        (-csq / big, big)
    } else {
        let big = 0.5 * ((a - b) - s);
        (big, -csq / big)
    };

    let col = |aml: f64| -> (Quaternion, Quaternion) {
        let n = (aml * aml + csq).sqrt();
        let top = -c / n;
        let bot = Quaternion::real(aml / n);
        let renorm = (top.norm_sqr() + bot.norm_sqr()).sqrt();
        (top / renorm, bot / renorm)
    };
    let (u_kk, u_lk) = col(a_m_l1);
    let (u_kl, u_ll) = col(a_m_l2);

    Ok(GivensPlan {
        k: 0,
        l: 1,
        u: [u_kk, u_kl, u_lk, u_ll],
        lambda1,
        lambda2,
        v_offdiag: None,
        x: 0.0,
        y: 0.0,
    })
}

/// Solves a dual quaternion Hermitian 2×2 exactly to first order.
///
/// Runs [`diag2_standard`] on the standard part, rotates the dual part to
/// `[[x, ẑ], [ẑ*, y]]`, and records the corrector entries
/// `D_kl = ẑ/(λ₂−λ₁)`, `D_lk = ẑ*/(λ₁−λ₂)`. The resulting `U·V` block is a
/// unitary dual quaternion and conjugation by it yields
/// `diag(λ₁ + xε, λ₂ + yε)`.
pub fn diag2_dual(q: &DQMatrix) -> Result<GivensPlan> {
    if q.rows() != 2 || q.cols() != 2 {
        return Err(Error::ShapeMismatch("dual kernel expects a 2x2 block".into()));
    }
    diag2_dual_entries(
        q.st.get(0, 0).w,
        q.st.get(1, 1).w,
        q.st.get(0, 1),
        [q.du.get(0, 0), q.du.get(0, 1), q.du.get(1, 0), q.du.get(1, 1)],
    )
}

/// Allocation-free kernel behind [`diag2_dual`]: standard block
/// `[[a, c], [c*, b]]`, dual block `m` row-major.
fn diag2_dual_entries(a: f64, b: f64, c: Quaternion, m: [Quaternion; 4]) -> Result<GivensPlan> {
    let mut plan = diag2_standard(a, b, c)?;

    // W = U* M U
    let u = &plan.u;
    let t = [
        u[0].conj() * m[0] + u[2].conj() * m[2],
        u[0].conj() * m[1] + u[2].conj() * m[3],
        u[1].conj() * m[0] + u[3].conj() * m[2],
        u[1].conj() * m[1] + u[3].conj() * m[3],
    ];
    let w00 = t[0] * u[0] + t[1] * u[2];
    let w01 = t[0] * u[1] + t[1] * u[3];
    let w11 = t[2] * u[1] + t[3] * u[3];

    let gap = plan.lambda1 - plan.lambda2; // = s > 0, never zero here
    plan.x = w00.sc();
    plan.y = w11.sc();
    plan.v_offdiag = Some((w01 / (-gap), w01.conj() / gap));
    Ok(plan)
}

/// Plans a standard-part rotation from the `(k, l)` block of a quaternion
/// Hermitian matrix.
pub fn plan_standard(m: &QMatrix, k: usize, l: usize) -> Result<GivensPlan> {
    if k >= l || l >= m.cols() || !m.is_square() {
        return Err(Error::IndexOutOfRange);
    }
    Ok(diag2_standard(m.get(k, k).w, m.get(l, l).w, m.get(k, l))?.at(k, l))
}

/// Plans a dual-aware rotation from the `(k, l)` block of a dual quaternion
/// Hermitian matrix.
pub fn plan_dual(q: &DQMatrix, k: usize, l: usize) -> Result<GivensPlan> {
    if k >= l || l >= q.cols() || !q.is_square() {
        return Err(Error::IndexOutOfRange);
    }
    let plan = diag2_dual_entries(
        q.st.get(k, k).w,
        q.st.get(l, l).w,
        q.st.get(k, l),
        [q.du.get(k, k), q.du.get(k, l), q.du.get(l, k), q.du.get(l, l)],
    )?;
    Ok(plan.at(k, l))
}

fn check_indices(q: &DQMatrix, k: usize, l: usize) -> Result<()> {
    if k >= l || l >= q.cols() || !q.is_square() {
        return Err(Error::IndexOutOfRange);
    }
    Ok(())
}

/// `Q ← G* Q G` for a 2×2 block `G` at `(k, l)`: touches rows and columns
/// `k, l` of both parts only.
fn two_sided_block(q: &mut DQMatrix, k: usize, l: usize, g: &[DualQuaternion; 4]) {
    let n = q.rows();
    for i in 0..n {
        let qik = q.get(i, k);
        let qil = q.get(i, l);
        q.set(i, k, qik * g[0] + qil * g[2]);
        q.set(i, l, qik * g[1] + qil * g[3]);
    }
    for j in 0..n {
        let qkj = q.get(k, j);
        let qlj = q.get(l, j);
        q.set(k, j, g[0].conj() * qkj + g[2].conj() * qlj);
        q.set(l, j, g[1].conj() * qkj + g[3].conj() * qlj);
    }
}

/// `A ← A G`: right-multiplies the accumulator, touching columns `k, l`.
fn right_block(a: &mut DQMatrix, k: usize, l: usize, g: &[DualQuaternion; 4]) {
    let n = a.rows();
    for i in 0..n {
        let aik = a.get(i, k);
        let ail = a.get(i, l);
        a.set(i, k, aik * g[0] + ail * g[2]);
        a.set(i, l, aik * g[1] + ail * g[3]);
    }
}

/// Applies a standard-part plan as `L* Q L` to both parts of `Q` and
/// right-multiplies the accumulator by `L`.
pub fn apply_standard_rotation(q: &mut DQMatrix, plan: &GivensPlan, acc: &mut DQMatrix) -> Result<()> {
    check_indices(q, plan.k, plan.l)?;
    let g = [
        DualQuaternion::standard(plan.u[0]),
        DualQuaternion::standard(plan.u[1]),
        DualQuaternion::standard(plan.u[2]),
        DualQuaternion::standard(plan.u[3]),
    ];
    two_sided_block(q, plan.k, plan.l, &g);
    right_block(acc, plan.k, plan.l, &g);
    Ok(())
}

/// Applies a dual-aware plan as `J* Q J`, eliminating both parts of the
/// `(k, l)`/`(l, k)` entries, and accumulates `J`.
pub fn apply_dual_givens(q: &mut DQMatrix, plan: &GivensPlan, acc: &mut DQMatrix) -> Result<()> {
    check_indices(q, plan.k, plan.l)?;
    if plan.v_offdiag.is_none() {
        return Err(Error::DegenerateOffdiag);
    }
    let g = plan.block();
    two_sided_block(q, plan.k, plan.l, &g);
    right_block(acc, plan.k, plan.l, &g);
    Ok(())
}

/// Dual-only decoupling rotation `J = I + Dε` built from the current matrix:
/// `D_kl = (Q_du)_kl/(d_l − d_k)`, `D_lk = −D_kl*` with `d` the standard
/// diagonal. The standard part of `Q` is untouched; the `(k, l)` dual entries
/// are annihilated up to cross terms with the residual standard off-diagonal.
/// Fails with [`Error::RepeatedDiagonal`] when the diagonal gap is below
/// `min_gap`.
pub fn apply_dual_decoupling(
    q: &mut DQMatrix,
    k: usize,
    l: usize,
    acc: &mut DQMatrix,
    min_gap: f64,
) -> Result<()> {
    check_indices(q, k, l)?;
    let dk = q.st.get(k, k).w;
    let dl = q.st.get(l, l).w;
    let gap = dl - dk;
    if gap.abs() <= min_gap {
        return Err(Error::RepeatedDiagonal);
    }
    let d_kl = q.du.get(k, l) / gap;
    let d_lk = -(d_kl.conj());
    let n = q.rows();

    // Q_du += D* Q_st + Q_st D; D* has −d_kl at (k,l) and d_kl* at (l,k)
    for c in 0..n {
        let add_k = -(d_kl * q.st.get(l, c));
        let add_l = d_kl.conj() * q.st.get(k, c);
        q.du.set(k, c, q.du.get(k, c) + add_k);
        q.du.set(l, c, q.du.get(l, c) + add_l);
    }
    for r in 0..n {
        let add_k = q.st.get(r, l) * d_lk;
        let add_l = q.st.get(r, k) * d_kl;
        q.du.set(r, k, q.du.get(r, k) + add_k);
        q.du.set(r, l, q.du.get(r, l) + add_l);
    }

    // accumulator: A ← A(I + Dε) adds A_st·D to the dual part
    for r in 0..acc.rows() {
        let add_k = acc.st.get(r, l) * d_lk;
        let add_l = acc.st.get(r, k) * d_kl;
        acc.du.set(r, k, acc.du.get(r, k) + add_k);
        acc.du.set(r, l, acc.du.get(r, l) + add_l);
    }
    Ok(())
}
