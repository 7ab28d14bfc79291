//! Dual number arithmetic: `a + bε` with real parts and `ε² = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::ZERO_TOL;

/// `st + du·ε`; the standard part carries the leading order, the dual part
/// the infinitesimal correction. Eigenvalues of dual quaternion Hermitian
/// matrices are values of this type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DualNumber {
    pub st: f64,
    pub du: f64,
}

impl DualNumber {
    pub const ZERO: DualNumber = DualNumber { st: 0.0, du: 0.0 };
    pub const ONE: DualNumber = DualNumber { st: 1.0, du: 0.0 };

    pub fn new(st: f64, du: f64) -> Self {
        DualNumber { st, du }
    }

    pub fn real(st: f64) -> Self {
        DualNumber { st, du: 0.0 }
    }

    /// `|a_st| + sgn(a_st)·a_du·ε` when the standard part is nonzero,
    /// `|a_du|·ε` otherwise.
    pub fn abs(self) -> Self {
        if self.st.abs() > ZERO_TOL {
            DualNumber { st: self.st.abs(), du: self.st.signum() * self.du }
        } else {
            DualNumber { st: 0.0, du: self.du.abs() }
        }
    }

    /// Lexicographic total order: standard parts first, dual parts break ties.
    pub fn cmp_dual(&self, other: &Self) -> Ordering {
        self.st.total_cmp(&other.st).then_with(|| self.du.total_cmp(&other.du))
    }

    /// First-order square root; requires an appreciable non-negative standard part.
    pub fn sqrt(self) -> Option<Self> {
        if self.st > ZERO_TOL {
            let r = self.st.sqrt();
            Some(DualNumber { st: r, du: self.du / (2.0 * r) })
        } else if self.st.abs() <= ZERO_TOL && self.du.abs() <= ZERO_TOL {
            Some(DualNumber::ZERO)
        } else {
            None
        }
    }

    pub fn scale(self, s: f64) -> Self {
        DualNumber { st: self.st * s, du: self.du * s }
    }
}

impl PartialOrd for DualNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_dual(other))
    }
}

impl Add for DualNumber {
    type Output = DualNumber;
    fn add(self, rhs: Self) -> Self {
        DualNumber { st: self.st + rhs.st, du: self.du + rhs.du }
    }
}

impl AddAssign for DualNumber {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for DualNumber {
    type Output = DualNumber;
    fn sub(self, rhs: Self) -> Self {
        DualNumber { st: self.st - rhs.st, du: self.du - rhs.du }
    }
}

impl Neg for DualNumber {
    type Output = DualNumber;
    fn neg(self) -> Self {
        DualNumber { st: -self.st, du: -self.du }
    }
}

/// `(a + bε)(c + dε) = ac + (ad + bc)ε`.
impl Mul for DualNumber {
    type Output = DualNumber;
    fn mul(self, rhs: Self) -> Self {
        DualNumber { st: self.st * rhs.st, du: self.st * rhs.du + self.du * rhs.st }
    }
}

impl fmt::Display for DualNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.du >= 0.0 {
            write!(f, "{} + {}ε", self.st, self.du)
        } else {
            write!(f, "{} - {}ε", self.st, -self.du)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn abs_sign_rule() {
        assert_eq!(DualNumber::new(-2.0, 3.0).abs(), DualNumber::new(2.0, -3.0));
        assert_eq!(DualNumber::new(0.0, -5.0).abs(), DualNumber::new(0.0, 5.0));
    }

    #[test]
    fn abs_is_multiplicative_on_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let a = DualNumber::new(
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
            );
            let lhs = a.abs() * a.abs();
            let rhs = (a * a).abs();
            assert!((lhs.st - rhs.st).abs() < 1e-12);
            assert!((lhs.du - rhs.du).abs() < 1e-12);
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(
            DualNumber::new(1.0, 0.0).cmp_dual(&DualNumber::new(0.0, 9.0)),
            Ordering::Greater
        );
        assert_eq!(
            DualNumber::new(1.0, 2.0).cmp_dual(&DualNumber::new(1.0, 3.0)),
            Ordering::Less
        );
        let a = DualNumber::new(0.5, -0.25);
        assert_eq!(a.cmp_dual(&a), Ordering::Equal);
    }

    #[test]
    fn order_is_antisymmetric_and_transitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let sample = |rng: &mut ChaCha8Rng| {
            // coarse grid so that ties actually occur
            let st = (rng.random_range(-3i32..=3)) as f64;
            let du = (rng.random_range(-3i32..=3)) as f64;
            DualNumber::new(st, du)
        };
        for _ in 0..2000 {
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            let c = sample(&mut rng);
            assert_eq!(a.cmp_dual(&b), b.cmp_dual(&a).reverse());
            if a.cmp_dual(&b) != Ordering::Greater && b.cmp_dual(&c) != Ordering::Greater {
                assert_ne!(a.cmp_dual(&c), Ordering::Greater);
            }
        }
    }

    #[test]
    fn sqrt_first_order() {
        let a = DualNumber::new(4.0, 3.0);
        let r = a.sqrt().unwrap();
        assert!((r.st - 2.0).abs() < 1e-15);
        assert!((r.du - 0.75).abs() < 1e-15);
        let sq = r * r;
        assert!((sq.st - a.st).abs() < 1e-12 && (sq.du - a.du).abs() < 1e-12);
        assert!(DualNumber::new(0.0, 1.0).sqrt().is_none());
    }
}
