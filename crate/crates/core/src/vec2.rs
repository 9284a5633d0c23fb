use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Point or vector in the shifted meridian half-plane, `x = (z, r - r0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarVec {
    pub x1: f64,
    pub x2: f64,
}

impl PlanarVec {
    pub const ZERO: PlanarVec = PlanarVec { x1: 0.0, x2: 0.0 };

    #[inline]
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    #[inline]
    pub fn dot(self, other: PlanarVec) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// Counter-clockwise quarter turn, `(-x2, x1)`.
    #[inline]
    pub fn perp(self) -> PlanarVec {
        PlanarVec::new(-self.x2, self.x1)
    }

    /// Rotation by `angle` radians about the origin.
    #[inline]
    pub fn rotated(self, angle: f64) -> PlanarVec {
        let (s, c) = angle.sin_cos();
        PlanarVec::new(c * self.x1 - s * self.x2, s * self.x1 + c * self.x2)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for PlanarVec {
    type Output = PlanarVec;
    #[inline]
    fn add(self, rhs: PlanarVec) -> PlanarVec {
        PlanarVec::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl AddAssign for PlanarVec {
    #[inline]
    fn add_assign(&mut self, rhs: PlanarVec) {
        self.x1 += rhs.x1;
        self.x2 += rhs.x2;
    }
}

impl Sub for PlanarVec {
    type Output = PlanarVec;
    #[inline]
    fn sub(self, rhs: PlanarVec) -> PlanarVec {
        PlanarVec::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl SubAssign for PlanarVec {
    #[inline]
    fn sub_assign(&mut self, rhs: PlanarVec) {
        self.x1 -= rhs.x1;
        self.x2 -= rhs.x2;
    }
}

impl Neg for PlanarVec {
    type Output = PlanarVec;
    #[inline]
    fn neg(self) -> PlanarVec {
        PlanarVec::new(-self.x1, -self.x2)
    }
}

impl Mul<PlanarVec> for f64 {
    type Output = PlanarVec;
    #[inline]
    fn mul(self, rhs: PlanarVec) -> PlanarVec {
        PlanarVec::new(self * rhs.x1, self * rhs.x2)
    }
}

impl Mul<f64> for PlanarVec {
    type Output = PlanarVec;
    #[inline]
    fn mul(self, rhs: f64) -> PlanarVec {
        PlanarVec::new(self.x1 * rhs, self.x2 * rhs)
    }
}
