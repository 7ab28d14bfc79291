//! Dual quaternion arithmetic: `q_st + q_du ε` with quaternion parts.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::dual::DualNumber;
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::ZERO_TOL;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DualQuaternion {
    pub st: Quaternion,
    pub du: Quaternion,
}

impl DualQuaternion {
    pub const ZERO: DualQuaternion = DualQuaternion { st: Quaternion::ZERO, du: Quaternion::ZERO };
    pub const ONE: DualQuaternion = DualQuaternion { st: Quaternion::ONE, du: Quaternion::ZERO };

    pub fn new(st: Quaternion, du: Quaternion) -> Self {
        DualQuaternion { st, du }
    }

    /// Embeds a quaternion with zero dual part.
    pub fn standard(st: Quaternion) -> Self {
        DualQuaternion { st, du: Quaternion::ZERO }
    }

    pub fn real(r: f64) -> Self {
        DualQuaternion { st: Quaternion::real(r), du: Quaternion::ZERO }
    }

    /// Embeds a dual number as a dual quaternion with real parts.
    pub fn from_dual(d: DualNumber) -> Self {
        DualQuaternion { st: Quaternion::real(d.st), du: Quaternion::real(d.du) }
    }

    pub fn conj(self) -> Self {
        DualQuaternion { st: self.st.conj(), du: self.du.conj() }
    }

    /// A dual quaternion is appreciable iff its standard part is nonzero.
    pub fn appreciable(self) -> bool {
        !self.st.is_zero()
    }

    pub fn is_zero(self) -> bool {
        self.st.is_zero() && self.du.is_zero()
    }

    /// `|p_st| + (sc(p_st* p_du)/|p_st|)ε` when appreciable, `|p_du|ε` otherwise.
    pub fn magnitude(self) -> DualNumber {
        if self.appreciable() {
            let m = self.st.magnitude();
            DualNumber::new(m, self.st.dot(self.du) / m)
        } else {
            DualNumber::new(0.0, self.du.magnitude())
        }
    }

    /// Two-sided inverse of an appreciable dual quaternion:
    /// `p_st⁻¹ − (p_st⁻¹ p_du p_st⁻¹)ε`.
    pub fn inverse(self) -> Result<Self> {
        if !self.appreciable() {
            return Err(Error::DivisionUndefined);
        }
        let si = self.st.inverse()?;
        Ok(DualQuaternion { st: si, du: -(si * self.du * si) })
    }

    /// Right division `p q⁻¹`.
    ///
    /// When `q` is appreciable this is
    /// `p_st q_st⁻¹ + (p_du q_st⁻¹ − p_st q_st⁻¹ q_du q_st⁻¹)ε`; when both
    /// standard parts vanish it degenerates to `p_du q_du⁻¹ + 0ε` (the free
    /// constant in that branch is fixed to zero so the result is
    /// deterministic). Anything else is undefined.
    // fallible, so a named method instead of `std::ops::Div`
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, q: Self) -> Result<Self> {
        if q.appreciable() {
            let qi = q.st.inverse()?;
            let head = self.st * qi;
            Ok(DualQuaternion { st: head, du: self.du * qi - head * q.du * qi })
        } else if !self.appreciable() {
            if q.du.is_zero() {
                return Err(Error::DivisionUndefined);
            }
            Ok(DualQuaternion { st: self.du * q.du.inverse()?, du: Quaternion::ZERO })
        } else {
            Err(Error::DivisionUndefined)
        }
    }

    pub fn scale(self, s: f64) -> Self {
        DualQuaternion { st: self.st * s, du: self.du * s }
    }
}

impl Add for DualQuaternion {
    type Output = DualQuaternion;
    fn add(self, rhs: Self) -> Self {
        DualQuaternion { st: self.st + rhs.st, du: self.du + rhs.du }
    }
}

impl AddAssign for DualQuaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for DualQuaternion {
    type Output = DualQuaternion;
    fn sub(self, rhs: Self) -> Self {
        DualQuaternion { st: self.st - rhs.st, du: self.du - rhs.du }
    }
}

impl SubAssign for DualQuaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for DualQuaternion {
    type Output = DualQuaternion;
    fn neg(self) -> Self {
        DualQuaternion { st: -self.st, du: -self.du }
    }
}

/// `p q = p_st q_st + (p_st q_du + p_du q_st)ε`; the ε² term vanishes.
impl Mul for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, rhs: Self) -> Self {
        DualQuaternion {
            st: self.st * rhs.st,
            du: self.st * rhs.du + self.du * rhs.st,
        }
    }
}

/// Dual numbers commute with dual quaternions, so one-sided scaling suffices.
impl Mul<DualNumber> for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, d: DualNumber) -> Self {
        DualQuaternion {
            st: self.st * d.st,
            du: self.st * d.du + self.du * d.st,
        }
    }
}

/// Unit dual quaternions satisfy `p p* = p* p = 1`; used by generators.
pub fn is_unit(p: DualQuaternion) -> bool {
    let m = p.magnitude();
    (m.st - 1.0).abs() <= 1e-10 && m.du.abs() <= 1e-10 && p.st.magnitude() > ZERO_TOL
}
