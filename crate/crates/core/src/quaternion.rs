//! Quaternion scalar arithmetic.
//!
//! A quaternion is a real four-vector `[w, x, y, z]` written `w + xi + yj + zk`
//! with the usual noncommutative Hamilton product. Quaternions serialize as
//! plain `[w, x, y, z]` arrays.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ZERO_TOL;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Embeds a real number as `r + 0i + 0j + 0k`.
    pub fn real(r: f64) -> Self {
        Quaternion { w: r, x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn conj(self) -> Self {
        Quaternion { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn magnitude(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scalar part `(q + q*)/2`, i.e. the `w` component.
    pub fn sc(self) -> f64 {
        self.w
    }

    /// Four-dimensional dot product; equals `sc(self* · other)`.
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_zero(self) -> bool {
        self.magnitude() <= ZERO_TOL
    }

    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.sqrt() <= ZERO_TOL {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.conj() / n)
    }

    /// Conjugate, magnitude, and inverse in one shot.
    ///
    /// Errors with [`Error::ZeroQuaternion`] when the magnitude is zero.
    pub fn conj_mag_inv(self) -> Result<(Self, f64, Self)> {
        let conj = self.conj();
        let mag = self.magnitude();
        if mag <= ZERO_TOL {
            return Err(Error::ZeroQuaternion);
        }
        Ok((conj, mag, conj / (mag * mag)))
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(v: [f64; 4]) -> Self {
        Quaternion { w: v[0], x: v[1], y: v[2], z: v[3] }
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> [f64; 4] {
        [q.w, q.x, q.y, q.z]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Self) -> Self {
        Quaternion { w: self.w + rhs.w, x: self.x + rhs.x, y: self.y + rhs.y, z: self.z + rhs.z }
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Self) -> Self {
        Quaternion { w: self.w - rhs.w, x: self.x - rhs.x, y: self.y - rhs.y, z: self.z - rhs.z }
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Self {
        Quaternion { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Hamilton product `[p0 q0 − p⃗·q⃗, p0 q⃗ + q0 p⃗ + p⃗ × q⃗]`.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Self) -> Self {
        Quaternion {
            w: self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            x: self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            y: self.w * r.y + self.y * r.w + self.z * r.x - self.x * r.z,
            z: self.w * r.z + self.z * r.w + self.x * r.y - self.y * r.x,
        }
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Self {
        Quaternion { w: self.w * s, x: self.x * s, y: self.y * s, z: self.z * s }
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Self {
        Quaternion { w: self.w / s, x: self.x / s, y: self.y / s, z: self.z / s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_quat(rng: &mut ChaCha8Rng) -> Quaternion {
        Quaternion::new(
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        )
    }

    /// 4×4 real matrix of left multiplication by `p`: `lmat(p) · vec(q) = vec(p q)`.
    /// Used as an independent route for checking the Hamilton product.
    fn lmat(p: Quaternion) -> [[f64; 4]; 4] {
        [
            [p.w, -p.x, -p.y, -p.z],
            [p.x, p.w, -p.z, p.y],
            [p.y, p.z, p.w, -p.x],
            [p.z, -p.y, p.x, p.w],
        ]
    }

    fn matvec(m: &[[f64; 4]; 4], v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in m.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        out
    }

    #[test]
    fn basis_products() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, -Quaternion::ONE);
        // sanity-check the matrix oracle against the same identity
        assert_eq!(matvec(&lmat(i), j.into()), <[f64; 4]>::from(k));
    }

    #[test]
    fn identity_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..32 {
            let q = random_quat(&mut rng);
            assert_eq!(Quaternion::ONE * q, q);
            assert_eq!(q * Quaternion::ONE, q);
        }
    }

    #[test]
    fn conj_and_magnitude() {
        assert_eq!(
            Quaternion::new(0.0, 1.0, 0.0, 0.0).conj(),
            Quaternion::new(0.0, -1.0, 0.0, 0.0)
        );
        assert_eq!(Quaternion::new(1.0, 2.0, 2.0, 4.0).magnitude(), 5.0);
    }

    #[test]
    fn inverse_roundtrip() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let inv = i.inverse().unwrap();
        assert_eq!(inv, Quaternion::new(0.0, -1.0, 0.0, 0.0));
        assert_eq!(i * inv, Quaternion::ONE);

        let (c, m, v) = Quaternion::new(1.0, 2.0, 2.0, 4.0).conj_mag_inv().unwrap();
        assert_eq!(c, Quaternion::new(1.0, -2.0, -2.0, -4.0));
        assert_eq!(m, 5.0);
        let p = Quaternion::new(1.0, 2.0, 2.0, 4.0) * v;
        assert!((p - Quaternion::ONE).magnitude() < 1e-15);

        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::ZeroQuaternion)));
    }

    #[test]
    fn q_times_conj_is_magnitude_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = random_quat(&mut rng);
            let p = q * q.conj();
            assert!((p.w - q.norm_sqr()).abs() <= 1e-12 * q.norm_sqr().max(1.0));
            assert!(p.x.abs() + p.y.abs() + p.z.abs() <= 1e-12 * q.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn product_matches_matrix_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let p = random_quat(&mut rng);
            let q = random_quat(&mut rng);
            let via_mat = Quaternion::from(matvec(&lmat(p), q.into()));
            assert!((p * q - via_mat).magnitude() < 1e-12);
            // |pq| = |p||q|
            assert!(((p * q).magnitude() - p.magnitude() * q.magnitude()).abs() < 1e-12);
        }
    }

    #[test]
    fn associativity_against_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let p = random_quat(&mut rng);
            let q = random_quat(&mut rng);
            let r = random_quat(&mut rng);
            let direct = (p * q) * r;
            let via_mat = Quaternion::from(matvec(&lmat(p), matvec(&lmat(q), r.into())));
            assert!((direct - via_mat).magnitude() < 1e-12);
        }
    }

    #[test]
    fn conj_antihomomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let p = random_quat(&mut rng);
            let q = random_quat(&mut rng);
            assert!(((p * q).conj() - q.conj() * p.conj()).magnitude() < 1e-12);
        }
    }
}
