//! Small fixed-size vector types used throughout the model.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Coincidence tolerance for points, in millimetres.
pub const LINEAR_TOLERANCE: f64 = 1e-6;
/// Angular tolerance for parallel / anti-parallel tests, in radians.
pub const ANGULAR_TOLERANCE: f64 = 1e-6;

/// A point in model space. Coordinates are millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A free vector (difference of two points).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A direction with unit Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    dx: f64,
    dy: f64,
    dz: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        (*other - *self).norm()
    }

    pub fn coincident(&self, other: &Point3) -> bool {
        self.distance(other) <= LINEAR_TOLERANCE
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Option<UnitVector> {
        UnitVector::new(self.x, self.y, self.z)
    }
}

impl UnitVector {
    pub const X: UnitVector = UnitVector { dx: 1.0, dy: 0.0, dz: 0.0 };
    pub const Y: UnitVector = UnitVector { dx: 0.0, dy: 1.0, dz: 0.0 };
    pub const Z: UnitVector = UnitVector { dx: 0.0, dy: 0.0, dz: 1.0 };

    /// Normalizes the given components. Returns `None` for zero-length or
    /// non-finite input.
    pub fn new(dx: f64, dy: f64, dz: f64) -> Option<Self> {
        let n = (dx * dx + dy * dy + dz * dz).sqrt();
        if !n.is_finite() || n < 1e-12 {
            return None;
        }
        Some(Self { dx: dx / n, dy: dy / n, dz: dz / n })
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.dx, self.dy, self.dz)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn dot(&self, o: &UnitVector) -> f64 {
        self.to_vec().dot(&o.to_vec())
    }

    pub fn is_parallel(&self, o: &UnitVector) -> bool {
        self.dot(o) > 1.0 - ANGULAR_TOLERANCE
    }

    pub fn is_anti_parallel(&self, o: &UnitVector) -> bool {
        self.dot(o) < -1.0 + ANGULAR_TOLERANCE
    }

    /// Some unit vector perpendicular to this one.
    pub fn any_perpendicular(&self) -> UnitVector {
        let v = self.to_vec();
        let helper = if v.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
        v.cross(&helper).normalized().expect("helper is never parallel")
    }
}

impl Neg for UnitVector {
    type Output = UnitVector;
    fn neg(self) -> UnitVector {
        UnitVector { dx: -self.dx, dy: -self.dy, dz: -self.dz }
    }
}

impl Serialize for UnitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        UnitVector::new(x, y, z).ok_or_else(|| serde::de::Error::custom("zero-length direction"))
    }
}

impl Sub for Point3 {
    type Output = Vec3;
    fn sub(self, o: Point3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Add<Vec3> for Point3 {
    type Output = Point3;
    fn add(self, v: Vec3) -> Point3 {
        Point3::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, v: Vec3) -> Vec3 {
        Vec3::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, v: Vec3) -> Vec3 {
        Vec3::new(self.x - v.x, self.y - v.y, self.z - v.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<f64> for UnitVector {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.to_vec() * s
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Orthonormal 2D frame embedded in a plane. `u × v` equals the plane normal.
#[derive(Debug, Clone, Copy)]
pub struct PlaneFrame {
    pub origin: Point3,
    pub u: UnitVector,
    pub v: UnitVector,
    pub normal: UnitVector,
}

impl PlaneFrame {
    pub fn new(origin: Point3, normal: UnitVector) -> Self {
        let u = normal.any_perpendicular();
        let v = normal.to_vec().cross(&u.to_vec()).normalized().expect("orthonormal");
        Self { origin, u, v, normal }
    }

    pub fn project(&self, p: &Point3) -> [f64; 2] {
        let d = *p - self.origin;
        [d.dot(&self.u.to_vec()), d.dot(&self.v.to_vec())]
    }

    /// Signed height of `p` above the plane along its normal.
    pub fn height(&self, p: &Point3) -> f64 {
        (*p - self.origin).dot(&self.normal.to_vec())
    }
}

/// Signed angle from `a` to `b` measured counter-clockwise about `axis`,
/// in `(-π, π]`.
pub fn signed_angle(a: &Vec3, b: &Vec3, axis: &UnitVector) -> f64 {
    let y = axis.to_vec().dot(&a.cross(b));
    let x = a.dot(b);
    y.atan2(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn unit_vector_rejects_zero() {
        assert!(UnitVector::new(0.0, 0.0, 0.0).is_none());
        assert!(UnitVector::new(f64::NAN, 0.0, 1.0).is_none());
        let u = UnitVector::new(3.0, 4.0, 0.0).unwrap();
        assert!((u.to_vec().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_is_right_handed() {
        for n in [UnitVector::X, UnitVector::Y, -UnitVector::Z, UnitVector::new(1.0, 2.0, 3.0).unwrap()] {
            let f = PlaneFrame::new(Point3::ORIGIN, n);
            let w = f.u.to_vec().cross(&f.v.to_vec());
            assert!((w - n.to_vec()).norm() < 1e-12);
        }
    }

    #[test]
    fn signed_angle_quadrant() {
        let a = Vec3::new(1.0, 0.0, 0.0);
        let b = Vec3::new(0.0, 1.0, 0.0);
        assert!((signed_angle(&a, &b, &UnitVector::Z) - FRAC_PI_2).abs() < 1e-12);
        assert!((signed_angle(&a, &b, &-UnitVector::Z) + FRAC_PI_2).abs() < 1e-12);
    }
}
