//! Dense matrices and vectors over quaternions and dual quaternions.
//!
//! Storage is row-major and dense throughout; Jacobi rotations densify any
//! sparsity immediately, so there is no sparse path even for graph
//! Laplacians. All norms of the scalar tower are provided: the dual-valued
//! 2-/F-norms with their degenerate branches and the real-valued `2ᴿ`/`Fᴿ`
//! variants.

use serde::{Deserialize, Serialize};

use crate::dual::DualNumber;
use crate::dualquat::DualQuaternion;
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::ZERO_TOL;

/// Relative tolerance for the Hermitian and unitary predicates.
pub const PREDICATE_RTOL: f64 = 1e-10;

/// Dense quaternion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Quaternion::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Quaternion) {
        self.data[i * self.cols + j] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix addition".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix subtraction".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = *a * s;
        }
        out
    }

    /// Hermitian part `(B + B*)/2`.
    pub fn hermitize(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("hermitize needs a square matrix".into()));
        }
        Ok(QMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        }))
    }

    pub fn fnorm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.fnorm() <= ZERO_TOL
    }

    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = PREDICATE_RTOL * self.fnorm();
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self.get(i, j) - self.get(j, i).conj()).magnitude() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = PREDICATE_RTOL * self.fnorm().max(1.0);
        let left = match self.adjoint().matmul(self) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let right = match self.matmul(&self.adjoint()) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let id = QMatrix::identity(self.rows);
        left.sub(&id).map(|d| d.fnorm()).unwrap_or(f64::INFINITY) <= tol
            && right.sub(&id).map(|d| d.fnorm()).unwrap_or(f64::INFINITY) <= tol
    }

    /// Off-diagonal measure `N(P) = ‖P‖_F² − Σᵢ|pᵢᵢ|²`.
    pub fn offdiag_sqsum(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc
    }

    /// Largest off-diagonal magnitude together with its position `(k, l)`, `k < l`.
    /// Ties resolve to the lexicographically smallest pair.
    pub fn max_offdiag(&self) -> (f64, usize, usize) {
        let mut best = (0.0, 0, 1);
        for k in 0..self.rows {
            for l in (k + 1)..self.cols {
                let m = self.get(k, l).norm_sqr();
                if m > best.0 {
                    best = (m, k, l);
                }
            }
        }
        (best.0.sqrt(), best.1, best.2)
    }
}

/// Dense dual quaternion matrix: a pair of quaternion matrices of one shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DQMatrix {
    pub st: QMatrix,
    pub du: QMatrix,
}

impl DQMatrix {
    pub fn new(st: QMatrix, du: QMatrix) -> Result<Self> {
        if st.rows() != du.rows() || st.cols() != du.cols() {
            return Err(Error::ShapeMismatch("standard and dual parts differ in shape".into()));
        }
        Ok(DQMatrix { st, du })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DQMatrix { st: QMatrix::zeros(rows, cols), du: QMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        DQMatrix { st: QMatrix::identity(n), du: QMatrix::zeros(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> DualQuaternion) -> Self {
        let mut m = DQMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.st.rows()
    }

    pub fn cols(&self) -> usize {
        self.st.cols()
    }

    pub fn is_square(&self) -> bool {
        self.st.is_square()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> DualQuaternion {
        DualQuaternion::new(self.st.get(i, j), self.du.get(i, j))
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: DualQuaternion) {
        self.st.set(i, j, v.st);
        self.du.set(i, j, v.du);
    }

    pub fn adjoint(&self) -> Self {
        DQMatrix { st: self.st.adjoint(), du: self.du.adjoint() }
    }

    /// `(AB)_st = A_st B_st`, `(AB)_du = A_st B_du + A_du B_st`.
    pub fn matmul(&self, other: &DQMatrix) -> Result<DQMatrix> {
        let st = self.st.matmul(&other.st)?;
        let du = self.st.matmul(&other.du)?.add(&self.du.matmul(&other.st)?)?;
        Ok(DQMatrix { st, du })
    }

    pub fn add(&self, other: &DQMatrix) -> Result<DQMatrix> {
        Ok(DQMatrix { st: self.st.add(&other.st)?, du: self.du.add(&other.du)? })
    }

    pub fn sub(&self, other: &DQMatrix) -> Result<DQMatrix> {
        Ok(DQMatrix { st: self.st.sub(&other.st)?, du: self.du.sub(&other.du)? })
    }

    pub fn scale(&self, s: f64) -> DQMatrix {
        DQMatrix { st: self.st.scale(s), du: self.du.scale(s) }
    }

    pub fn appreciable(&self) -> bool {
        !self.st.is_zero()
    }

    /// Dual-valued Frobenius norm with its degenerate branch:
    /// `‖Q_st‖_F + (sc(tr(Q_st* Q_du))/‖Q_st‖_F)ε` when the standard part is
    /// nonzero, `‖Q_du‖_F ε` otherwise.
    pub fn fnorm_dual(&self) -> DualNumber {
        let st_norm = self.st.fnorm();
        if st_norm > ZERO_TOL {
            let mut cross = 0.0;
            for i in 0..self.rows() {
                for j in 0..self.cols() {
                    cross += self.st.get(i, j).dot(self.du.get(i, j));
                }
            }
            DualNumber::new(st_norm, cross / st_norm)
        } else {
            DualNumber::new(0.0, self.du.fnorm())
        }
    }

    /// Real-valued norm `sqrt(‖Q_st‖_F² + ‖Q_du‖_F²)`.
    pub fn frnorm(&self) -> f64 {
        self.st.fnorm().hypot(self.du.fnorm())
    }

    /// Both matrix norms at once: `(‖Q‖_F, ‖Q‖_Fᴿ)`.
    pub fn mat_norms(&self) -> (DualNumber, f64) {
        (self.fnorm_dual(), self.frnorm())
    }

    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = PREDICATE_RTOL * self.frnorm();
        for i in 0..self.rows() {
            for j in i..self.cols() {
                let d = self.get(i, j) - self.get(j, i).conj();
                if d.st.magnitude() > tol || d.du.magnitude() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = PREDICATE_RTOL * self.frnorm().max(1.0);
        let id = DQMatrix::identity(self.rows());
        let ok = |p: Result<DQMatrix>| -> bool {
            p.and_then(|m| m.sub(&id)).map(|d| d.frnorm()).unwrap_or(f64::INFINITY) <= tol
        };
        ok(self.adjoint().matmul(self)) && ok(self.matmul(&self.adjoint()))
    }

    /// Off-diagonal measures of both parts: `(N(Q_st), N(Q_du))`.
    pub fn offdiag_measure(&self) -> Result<(f64, f64)> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("off-diagonal measure needs a square matrix".into()));
        }
        Ok((self.st.offdiag_sqsum(), self.du.offdiag_sqsum()))
    }

    /// Dual-valued off-diagonal measure `‖Q‖_F² − Σᵢ|qᵢᵢ|²` computed in dual
    /// arithmetic; its standard part equals `N(Q_st)`.
    pub fn offdiag_measure_dual(&self) -> Result<DualNumber> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("off-diagonal measure needs a square matrix".into()));
        }
        let mut acc = DualNumber::ZERO;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if i != j {
                    let m = self.get(i, j).magnitude();
                    acc += m * m;
                }
            }
        }
        Ok(acc)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &DQVector) -> Result<DQVector> {
        if self.cols() != x.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows(),
                self.cols(),
                x.len()
            )));
        }
        let mut out = vec![DualQuaternion::ZERO; self.rows()];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..self.cols() {
                *o += self.get(i, j) * x.entries[j];
            }
        }
        Ok(DQVector { entries: out })
    }

    pub fn column(&self, j: usize) -> DQVector {
        DQVector { entries: (0..self.rows()).map(|i| self.get(i, j)).collect() }
    }

    /// Serializes to the on-disk JSON schema
    /// `{"n": ..., "st": [[[w,x,y,z],...],...], "du": [...]}` (square only).
    pub fn to_json(&self) -> Result<String> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("JSON schema covers square matrices only".into()));
        }
        let n = self.rows();
        let pack = |m: &QMatrix| -> Vec<Vec<[f64; 4]>> {
            (0..n).map(|i| (0..n).map(|j| m.get(i, j).into()).collect()).collect()
        };
        let file = MatrixFile { n, st: pack(&self.st), du: pack(&self.du) };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<DQMatrix> {
        let file: MatrixFile = serde_json::from_str(text)?;
        let unpack = |rows: &Vec<Vec<[f64; 4]>>, part: &str| -> Result<QMatrix> {
            if rows.len() != file.n || rows.iter().any(|r| r.len() != file.n) {
                return Err(Error::ShapeMismatch(format!(
                    "{part} part does not match declared size {}",
                    file.n
                )));
            }
            Ok(QMatrix::from_fn(file.n, file.n, |i, j| Quaternion::from(rows[i][j])))
        };
        Ok(DQMatrix { st: unpack(&file.st, "standard")?, du: unpack(&file.du, "dual")? })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    st: Vec<Vec<[f64; 4]>>,
    du: Vec<Vec<[f64; 4]>>,
}

/// Column vector of dual quaternions.
#[derive(Clone, Debug, PartialEq)]
pub struct DQVector {
    pub entries: Vec<DualQuaternion>,
}

impl DQVector {
    pub fn zeros(n: usize) -> Self {
        DQVector { entries: vec![DualQuaternion::ZERO; n] }
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = DQVector::zeros(n);
        v.entries[i] = DualQuaternion::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn st_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.st.norm_sqr()).sum::<f64>().sqrt()
    }

    fn du_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.du.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Dual-valued 2-norm with its degenerate branch.
    pub fn norm_2(&self) -> DualNumber {
        let st = self.st_norm();
        if st > ZERO_TOL {
            let cross: f64 = self.entries.iter().map(|q| q.st.dot(q.du)).sum();
            DualNumber::new(st, cross / st)
        } else {
            DualNumber::new(0.0, self.du_norm())
        }
    }

    /// Real-valued norm `sqrt(‖x_st‖² + ‖x_du‖²)`.
    pub fn norm_2r(&self) -> f64 {
        self.st_norm().hypot(self.du_norm())
    }

    /// Both vector norms at once: `(‖x‖₂, ‖x‖₂ᴿ)`.
    pub fn norms(&self) -> (DualNumber, f64) {
        (self.norm_2(), self.norm_2r())
    }

    pub fn scale(&self, s: f64) -> DQVector {
        DQVector { entries: self.entries.iter().map(|q| q.scale(s)).collect() }
    }

    pub fn sub(&self, other: &DQVector) -> Result<DQVector> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch("vector subtraction".into()));
        }
        Ok(DQVector {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| *a - *b).collect(),
        })
    }
}

/// Hoffman–Wielandt check restricted to standard parts: sorted standard-part
/// eigenvalue vectors of two Hermitian matrices must differ by no more than
/// the Frobenius distance of the standard parts. Eigenvalues come from the
/// complex-embedding oracle; a small absolute slack covers roundoff.
pub fn hw_check(q1: &DQMatrix, q2: &DQMatrix) -> Result<bool> {
    if q1.rows() != q2.rows() || !q1.is_square() || !q2.is_square() {
        return Err(Error::ShapeMismatch("Hoffman-Wielandt needs equal square shapes".into()));
    }
    if !q1.is_hermitian() || !q2.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let e1 = crate::oracle::standard_eigs_oracle(&q1.st)?;
    let e2 = crate::oracle::standard_eigs_oracle(&q2.st)?;
    let lhs = e1
        .iter()
        .zip(&e2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let rhs = q1.st.sub(&q2.st)?.fnorm();
    Ok(lhs <= rhs + 1e-9)
}
