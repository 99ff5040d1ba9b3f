//! Three-component vectors and the angle conventions used throughout.
//!
//! World frame: x and y span the horizontal plane, z is altitude (up).
//! Headings are measured from +x towards +y.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// Unit vector for a flight-path angle and heading.
    pub fn from_angles(gamma: T, psi: T) -> Self {
        let cg = gamma.cos();
        Self::new(cg * psi.cos(), cg * psi.sin(), gamma.sin())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn horizontal_norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero()).then(|| self * n.recip())
    }

    /// Heading of the horizontal projection, in (−π, π].
    pub fn heading(self) -> T {
        self.y.atan2(self.x)
    }

    /// Angle above the horizontal plane.
    pub fn elevation(self) -> T {
        self.z.atan2(self.horizontal_norm())
    }

    /// Rotation about the vertical axis by `angle`.
    pub fn yawed(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle<T: Scalar>(angle: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    if angle > -pi && angle <= pi {
        return angle;
    }
    let mut a = angle % two_pi;
    if a <= -pi {
        a += two_pi;
    } else if a > pi {
        a -= two_pi;
    }
    a
}

/// Unsigned angle between two vectors in [0, π]. Zero if either is degenerate.
pub fn angle_between<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> T {
    // atan2 of |a×b| and a·b stays accurate near 0 and π, unlike acos.
    let cross = a.cross(b).norm();
    let dot = a.dot(b);
    if cross == T::zero() && dot == T::zero() {
        return T::zero();
    }
    cross.atan2(dot)
}

/// Minimum distance between two points moving linearly over a unit interval,
/// from (`a0`, `b0`) at the start to (`a1`, `b1`) at the end.
pub fn closest_approach<T: Scalar>(a0: Vec3<T>, a1: Vec3<T>, b0: Vec3<T>, b1: Vec3<T>) -> T {
    let r0 = b0 - a0;
    let dr = (b1 - a1) - r0;
    let denom = dr.norm_sq();
    let tau = if denom > T::zero() {
        (-r0.dot(dr) / denom).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    (r0 + dr * tau).norm()
}
