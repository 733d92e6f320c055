//! Points of the covering plane, integer lattice vectors and the torus
//! projection `ℝ² → ℝ²/ℤ²`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A point (or vector) of the covering plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Rotation by +90°.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Add<IntVec> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: IntVec) -> Vec2 {
        self + rhs.to_vec2()
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An element of ℤ², e.g. a deck translation or a homology class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct IntVec {
    pub a: i64,
    pub b: i64,
}

impl IntVec {
    pub const ZERO: IntVec = IntVec { a: 0, b: 0 };
    pub const E1: IntVec = IntVec { a: 1, b: 0 };
    pub const E2: IntVec = IntVec { a: 0, b: 1 };

    #[inline]
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    /// `v⊥ = (−b, a)`.
    #[inline]
    pub fn perp(self) -> IntVec {
        IntVec::new(-self.b, self.a)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    #[inline]
    pub fn to_vec2(self) -> Vec2 {
        Vec2::new(self.a as f64, self.b as f64)
    }

    /// Nonzero vector with coprime entries.
    pub fn is_primitive(self) -> bool {
        !self.is_zero() && gcd(self.a, self.b) == 1
    }

    /// Divide out the content and make the leading nonzero entry positive.
    pub fn primitive_canonical(self) -> IntVec {
        if self.is_zero() {
            return self;
        }
        let g = gcd(self.a, self.b);
        let mut v = IntVec::new(self.a / g, self.b / g);
        if v.a < 0 || (v.a == 0 && v.b < 0) {
            v = -v;
        }
        v
    }
}

impl Add for IntVec {
    type Output = IntVec;
    #[inline]
    fn add(self, rhs: IntVec) -> IntVec {
        IntVec::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for IntVec {
    type Output = IntVec;
    #[inline]
    fn sub(self, rhs: IntVec) -> IntVec {
        IntVec::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for IntVec {
    type Output = IntVec;
    #[inline]
    fn neg(self) -> IntVec {
        IntVec::new(-self.a, -self.b)
    }
}

impl Mul<i64> for IntVec {
    type Output = IntVec;
    #[inline]
    fn mul(self, rhs: i64) -> IntVec {
        IntVec::new(self.a * rhs, self.b * rhs)
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Non-negative gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A point of `𝕋² = ℝ²/ℤ²`, stored in the fundamental domain `[0,1)²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

impl TorusPoint {
    /// Build from coordinates, reducing them mod 1.
    pub fn new(x: f64, y: f64) -> Self {
        project(Vec2::new(x, y))
    }

    /// The lift lying in the fundamental domain.
    #[inline]
    pub fn lift(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Length of the shortest representative of `self − other`.
    pub fn dist(self, other: TorusPoint) -> f64 {
        let dx = wrap_half(self.x - other.x);
        let dy = wrap_half(self.y - other.y);
        dx.hypot(dy)
    }
}

#[inline]
fn frac(t: f64) -> f64 {
    let r = t - t.floor();
    // t slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `t mod 1` in `[-1/2, 1/2)`.
#[inline]
pub fn wrap_half(t: f64) -> f64 {
    let r = frac(t + 0.5) - 0.5;
    if r < -0.5 {
        r + 1.0
    } else {
        r
    }
}

/// The covering projection `π`: componentwise fractional part.
#[inline]
pub fn project(z: Vec2) -> TorusPoint {
    TorusPoint { x: frac(z.x), y: frac(z.y) }
}

/// Integer part of a point of the plane, so that `z = project(z) + floor(z)`.
#[inline]
pub fn deck_part(z: Vec2) -> IntVec {
    let p = project(z);
    IntVec::new((z.x - p.x).round() as i64, (z.y - p.y).round() as i64)
}

/// Integer 2×2 matrix acting on deck translations: the homotopy class of a
/// torus map, read off from its lift as `f̂(z + v) = f̂(z) + L·v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearPart(pub [[i64; 2]; 2]);

impl LinearPart {
    pub const IDENTITY: LinearPart = LinearPart([[1, 0], [0, 1]]);
    /// `(x, y) ↦ (y, −x)`
    pub const QUARTER_TURN: LinearPart = LinearPart([[0, 1], [-1, 0]]);

    #[inline]
    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn apply(&self, v: IntVec) -> IntVec {
        let m = &self.0;
        IntVec::new(m[0][0] * v.a + m[0][1] * v.b, m[1][0] * v.a + m[1][1] * v.b)
    }

    pub fn compose(&self, rhs: &LinearPart) -> LinearPart {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        LinearPart(out)
    }

    pub fn pow(&self, k: u32) -> LinearPart {
        (0..k).fold(Self::IDENTITY, |acc, _| acc.compose(self))
    }
}

impl fmt::Display for LinearPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn project_examples() {
        assert_eq!(project(Vec2::new(1.25, -0.5)), TorusPoint { x: 0.25, y: 0.5 });
        assert_eq!(project(Vec2::new(0.0, 0.0)), TorusPoint { x: 0.0, y: 0.0 });
        assert_eq!(project(Vec2::new(3.0, 2.0)), TorusPoint { x: 0.0, y: 0.0 });
    }

    #[test]
    fn project_tiny_negative_stays_in_domain() {
        let p = project(Vec2::new(-1e-18, -0.0));
        assert!(p.x >= 0.0 && p.x < 1.0);
        assert!(p.y >= 0.0 && p.y < 1.0);
    }

    #[test]
    fn deck_part_recovers_integer_shift() {
        let z = Vec2::new(-2.75, 5.5);
        let d = deck_part(z);
        assert_eq!(d, IntVec::new(-3, 5));
        let p = project(z);
        assert_eq!(p.lift() + d, z);
    }

    #[test]
    fn perp_and_canonical() {
        assert_eq!(IntVec::new(2, 3).perp(), IntVec::new(-3, 2));
        assert_eq!(IntVec::new(-4, 6).primitive_canonical(), IntVec::new(2, -3));
        assert_eq!(IntVec::new(0, -5).primitive_canonical(), IntVec::new(0, 1));
        assert!(IntVec::new(3, -2).is_primitive());
        assert!(!IntVec::new(2, 4).is_primitive());
    }

    #[test]
    fn quarter_turn_has_order_four() {
        let q = LinearPart::QUARTER_TURN;
        assert!(!q.pow(2).is_identity());
        assert!(q.pow(4).is_identity());
        assert_eq!(q.apply(IntVec::E1), IntVec::new(0, -1));
    }

    #[test]
    fn torus_distance_wraps() {
        let a = TorusPoint::new(0.95, 0.5);
        let b = TorusPoint::new(0.05, 0.5);
        assert!((a.dist(b) - 0.1).abs() < 1e-12);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn project_is_idempotent(x in -1e6f64..1e6, y in -1e6f64..1e6) {
                let p = project(Vec2::new(x, y));
                prop_assert!(p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0);
                prop_assert_eq!(project(p.lift()), p);
            }
        }
    }
}
