//! Independent eigenvalue verification through the complex-adjoint embedding.
//!
//! A quaternion `w + xi + yj + zk` maps to the 2×2 complex block
//! `[[w+xi, y+zi], [−y+zi, w−xi]]`; entrywise application turns an `n×n`
//! quaternion Hermitian matrix into a `2n×2n` complex Hermitian matrix whose
//! spectrum is the quaternion spectrum with every eigenvalue doubled. The
//! embedded problem is solved here by a classical cyclic Jacobi iteration for
//! complex Hermitian matrices that deliberately shares no code with the dual
//! quaternion solvers — that independence is what makes this module usable as
//! an oracle in their tests.

use num_complex::Complex64;

use crate::dual::DualNumber;
use crate::matrix::{DQMatrix, QMatrix};
use crate::quaternion::Quaternion;
use crate::{Error, Result};

/// Absolute tolerance for matching the doubled eigenvalues of the embedding.
pub const PAIRING_TOL: f64 = 1e-8;

/// Complex Hermitian matrix produced by [`complex_adjoint`]; dimension `2n`.
#[derive(Clone, Debug)]
pub struct ComplexHermitian {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexHermitian {
    fn zeros(dim: usize) -> Self {
        ComplexHermitian { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in i..self.dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    fn fnorm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn offdiag_sqsum(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc
    }
}

/// Embeds a quaternion Hermitian matrix into `C^{2n×2n}`.
pub fn complex_adjoint(q: &QMatrix) -> Result<ComplexHermitian> {
    if !q.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let n = q.rows();
    let mut out = ComplexHermitian::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let e = q.get(i, j);
            out.set(2 * i, 2 * j, Complex64::new(e.w, e.x));
            out.set(2 * i, 2 * j + 1, Complex64::new(e.y, e.z));
            out.set(2 * i + 1, 2 * j, Complex64::new(-e.y, e.z));
            out.set(2 * i + 1, 2 * j + 1, Complex64::new(e.w, -e.x));
        }
    }
    Ok(out)
}

/// Multiplicative check helper used by tests: the embedding of a product.
pub fn complex_adjoint_unchecked(q: &QMatrix) -> ComplexHermitian {
    let n = q.rows();
    let mut out = ComplexHermitian::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let e = q.get(i, j);
            out.set(2 * i, 2 * j, Complex64::new(e.w, e.x));
            out.set(2 * i, 2 * j + 1, Complex64::new(e.y, e.z));
            out.set(2 * i + 1, 2 * j, Complex64::new(-e.y, e.z));
            out.set(2 * i + 1, 2 * j + 1, Complex64::new(e.w, -e.x));
        }
    }
    out
}

pub fn complex_matmul(a: &ComplexHermitian, b: &ComplexHermitian) -> ComplexHermitian {
    let n = a.dim;
    let mut out = ComplexHermitian::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let v = a.get(i, k);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let cur = out.get(i, j);
                out.set(i, j, cur + v * b.get(k, j));
            }
        }
    }
    out
}

/// Classical cyclic Jacobi for complex Hermitian matrices. Returns the
/// eigenvalues on the diagonal of the worked matrix and the accumulated
/// unitary whose columns are eigenvectors.
fn cyclic_jacobi(a: &mut ComplexHermitian) -> Result<(Vec<f64>, ComplexHermitian)> {
    let n = a.dim;
    let scale = a.fnorm().max(1.0);
    let mut v = ComplexHermitian::zeros(n);
    for i in 0..n {
        v.set(i, i, Complex64::new(1.0, 0.0));
    }

    const MAX_SWEEPS: usize = 100;
    let stop = 1e-14 * scale;
    for _ in 0..MAX_SWEEPS {
        if a.offdiag_sqsum().sqrt() <= stop {
            let eigs = (0..n).map(|i| a.get(i, i).re).collect();
            return Ok((eigs, v));
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= 1e-18 * scale {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // phase that makes the pivot effectively real, then the
                // classical stable tangent choice
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);

                // A <- G* A G with G = [[c, s], [-s̄, c]] at (p, q)
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c - aiq * s.conj());
                    a.set(i, q, aip * s + aiq * c);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * s);
                    a.set(q, j, apj * s.conj() + aqj * c);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * s.conj());
                    v.set(i, q, vip * s + viq * c);
                }
            }
        }
    }
    Err(Error::NoConvergence("cyclic Jacobi exceeded the sweep budget".into()))
}

/// Eigenvalues plus phase-fixed quaternion eigenvectors of a quaternion
/// Hermitian matrix, both sorted by descending eigenvalue.
///
/// The embedding doubles every eigenvalue; the doubled pairs must agree to
/// [`PAIRING_TOL`] or the call fails with [`Error::PairingFailure`]. One
/// complex eigenvector per pair is pulled back to a quaternion vector, unit
/// normalized, and phase-fixed by right-multiplying with the conjugate phase
/// of its largest component so reruns produce identical output.
pub fn standard_eigenbasis(q: &QMatrix) -> Result<(Vec<f64>, QMatrix)> {
    let n = q.rows();
    let mut emb = complex_adjoint(q)?;
    let (eigs, vecs) = cyclic_jacobi(&mut emb)?;

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eigs[j].total_cmp(&eigs[i]));

    let mut values = Vec::with_capacity(n);
    let mut basis = QMatrix::zeros(n, n);
    for k in 0..n {
        let a = eigs[order[2 * k]];
        let b = eigs[order[2 * k + 1]];
        if (a - b).abs() > PAIRING_TOL {
            return Err(Error::PairingFailure(format!(
                "eigenvalues {a} and {b} differ beyond {PAIRING_TOL}"
            )));
        }
        values.push(0.5 * (a + b));

        // pull one column of the pair back to a quaternion vector
        let col = order[2 * k];
        let mut v: Vec<Quaternion> = (0..n)
            .map(|i| {
                let za = vecs.get(2 * i, col);
                let zb = vecs.get(2 * i + 1, col);
                Quaternion::new(za.re, za.im, -zb.re, zb.im)
            })
            .collect();
        let norm = v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        for e in v.iter_mut() {
            *e = *e / norm;
        }
        // deterministic phase: largest component becomes real positive
        let m = (0..n)
            .max_by(|&i, &j| v[i].norm_sqr().total_cmp(&v[j].norm_sqr()))
            .expect("nonempty vector");
        let phase = v[m].conj() / v[m].magnitude();
        for e in v.iter_mut() {
            *e = *e * phase;
        }
        for (i, e) in v.into_iter().enumerate() {
            basis.set(i, k, e);
        }
    }
    Ok((values, basis))
}

/// Standard-part eigenvalues, deduplicated and sorted descending.
pub fn standard_eigs_oracle(q: &QMatrix) -> Result<Vec<f64>> {
    Ok(standard_eigenbasis(q)?.0)
}

/// Dual-number eigenvalues of a dual quaternion Hermitian matrix with a
/// simple standard spectrum: the standard part is diagonalized through the
/// embedding and each dual part is the Rayleigh value `sc(v* Q_du v)` of the
/// corresponding standard eigenvector. Fails with
/// [`Error::DegenerateSpectrum`] when the smallest standard gap is below
/// `1e-6`, where the pairing of dual parts to eigenvectors stops being
/// well-defined.
pub fn dual_eigs_oracle(q: &DQMatrix) -> Result<Vec<DualNumber>> {
    if !q.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let (values, basis) = standard_eigenbasis(&q.st)?;
    let n = values.len();
    for w in values.windows(2) {
        if (w[0] - w[1]).abs() <= 1e-6 {
            return Err(Error::DegenerateSpectrum);
        }
    }
    let mut out = Vec::with_capacity(n);
    for (k, &mu) in values.iter().enumerate() {
        // v_k* Q_du v_k is real for Hermitian Q_du; take its scalar part
        let mut acc = Quaternion::ZERO;
        for i in 0..n {
            let mut row = Quaternion::ZERO;
            for j in 0..n {
                row += q.du.get(i, j) * basis.get(j, k);
            }
            acc += basis.get(i, k).conj() * row;
        }
        out.push(DualNumber::new(mu, acc.sc()));
    }
    out.sort_by(|a, b| b.cmp_dual(a));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{demo_p5, gen_random_hermitian};
    use crate::givens::diag2_dual;

    #[test]
    fn scalar_embedding() {
        let q = QMatrix::from_fn(1, 1, |_, _| Quaternion::real(2.5));
        let e = complex_adjoint(&q).unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.get(0, 0), Complex64::new(2.5, 0.0));
        assert_eq!(e.get(1, 1), Complex64::new(2.5, 0.0));
        assert_eq!(e.get(0, 1), Complex64::new(0.0, 0.0));
        let eigs = standard_eigs_oracle(&q).unwrap();
        assert_eq!(eigs, vec![2.5]);
    }

    #[test]
    fn identity_embeds_to_identity() {
        let e = complex_adjoint(&QMatrix::identity(3)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(e.get(i, j), Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn embedding_is_multiplicative() {
        for seed in 0..10 {
            let a = gen_random_hermitian(3, 800 + seed).st;
            let b = gen_random_hermitian(3, 900 + seed).st;
            let prod = a.matmul(&b).unwrap();
            let lhs = complex_adjoint_unchecked(&prod);
            let rhs = complex_matmul(&complex_adjoint_unchecked(&a), &complex_adjoint_unchecked(&b));
            let mut err: f64 = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    err = err.max((lhs.get(i, j) - rhs.get(i, j)).norm());
                }
            }
            assert!(err < 1e-12 * (1.0 + lhs.fnorm()));
        }
    }

    #[test]
    fn eigenvalues_come_in_exact_pairs() {
        for seed in 0..10 {
            let q = gen_random_hermitian(3, 1000 + seed).st;
            let mut emb = complex_adjoint(&q).unwrap();
            let (mut eigs, _) = cyclic_jacobi(&mut emb).unwrap();
            eigs.sort_by(|a, b| b.total_cmp(a));
            for pair in eigs.chunks_exact(2) {
                assert!((pair[0] - pair[1]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_and_closed_form_cases() {
        let q = QMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Quaternion::real(if i == 0 { 3.0 } else { 1.0 })
            } else {
                Quaternion::ZERO
            }
        });
        assert_eq!(standard_eigs_oracle(&q).unwrap(), vec![3.0, 1.0]);

        // 2x2 with off-diagonal: roots of (a-x)(b-x) = |c|^2
        let c = Quaternion::new(0.3, -1.1, 0.7, 0.2);
        let (a, b) = (1.25, -0.5);
        let m = QMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Quaternion::real(a),
            (1, 1) => Quaternion::real(b),
            (0, 1) => c,
            _ => c.conj(),
        });
        let disc = ((a - b) * (a - b) + 4.0 * c.norm_sqr()).sqrt();
        let want = [0.5 * (a + b + disc), 0.5 * (a + b - disc)];
        let got = standard_eigs_oracle(&m).unwrap();
        assert!((got[0] - want[0]).abs() < 1e-10);
        assert!((got[1] - want[1]).abs() < 1e-10);
    }

    #[test]
    fn demo_matrix_standard_spectrum() {
        let p = demo_p5();
        let eigs = standard_eigs_oracle(&p.st).unwrap();
        let golden = 0.5 * (5f64.sqrt() - 1.0); // 0.6180...
        let want = [2.0, golden, golden, -golden - 1.0, -golden - 1.0];
        for (g, w) in eigs.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-3, "got {g}, want {w}");
        }
    }

    #[test]
    fn dual_oracle_on_diagonal_input() {
        let mut q = DQMatrix::zeros(3, 3);
        for (i, (s, d)) in [(3.0, 0.5), (2.0, -1.0), (1.0, 0.25)].iter().enumerate() {
            q.set(i, i, DualQuaternion::new(Quaternion::real(*s), Quaternion::real(*d)));
        }
        let eigs = dual_eigs_oracle(&q).unwrap();
        assert_eq!(eigs[0], DualNumber::new(3.0, 0.5));
        assert_eq!(eigs[1], DualNumber::new(2.0, -1.0));
        assert_eq!(eigs[2], DualNumber::new(1.0, 0.25));
    }

    use crate::dualquat::DualQuaternion;

    #[test]
    fn dual_oracle_matches_two_by_two_kernel() {
        for seed in 0..10 {
            let q = gen_random_hermitian(2, 1100 + seed);
            let plan = diag2_dual(&q).unwrap();
            let got = dual_eigs_oracle(&q).unwrap();
            let mut want = [
                DualNumber::new(plan.lambda1, plan.x),
                DualNumber::new(plan.lambda2, plan.y),
            ];
            want.sort_by(|a, b| b.cmp_dual(a));
            for (g, w) in got.iter().zip(want.iter()) {
                assert!((g.st - w.st).abs() < 1e-10);
                assert!((g.du - w.du).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn phase_fixing_is_deterministic() {
        let q = gen_random_hermitian(5, 1200).st;
        let (e1, b1) = standard_eigenbasis(&q).unwrap();
        let (e2, b2) = standard_eigenbasis(&q).unwrap();
        assert_eq!(e1, e2);
        for i in 0..5 {
            for j in 0..5 {
                assert!((b1.get(i, j) - b2.get(i, j)).magnitude() < 1e-12);
            }
        }
        // and the basis actually diagonalizes: residual per column
        for (k, &mu) in e1.iter().enumerate() {
            let mut resid: f64 = 0.0;
            for i in 0..5 {
                let mut acc = Quaternion::ZERO;
                for j in 0..5 {
                    acc += q.get(i, j) * b1.get(j, k);
                }
                resid = resid.max((acc - b1.get(i, k) * mu).magnitude());
            }
            assert!(resid < 1e-9, "column {k} residual {resid}");
        }
    }
}
