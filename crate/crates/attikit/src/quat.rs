//! Quaternion and rotation-matrix algebra.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! * Quaternions are scalar-first, `[m, n1, n2, n3]`, with `m = cos(theta/2)`
//!   and `n = u * sin(theta/2)` for a rotation of `theta` about the unit
//!   axis `u`.
//! * Multiplication is the Hamilton product (right-handed, `i * j = k`).
//! * A unit quaternion maps body-frame vectors to inertial-frame vectors
//!   through [`Quat::to_rotation_matrix`].
//! * Angles extracted by [`Quat::axis_angle`] live in `[0, 2*pi]` and are
//!   never folded onto the short side: a quaternion with negative scalar
//!   part yields an angle greater than `pi`. Controllers built on top of
//!   this module depend on that choice.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Vector parts with norm at or below this are treated as having no
/// well-defined rotation axis.
pub const EPS_AXIS: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum QuatError {
    #[error("quaternion norm is zero")]
    ZeroNorm,
    #[error("quaternion is not unit length (norm = {0})")]
    NotUnit(f64),
    #[error("rotation axis is not unit length (norm = {0})")]
    NonUnitAxis(f64),
}

/// Three-component vector of `f64`. Units depend on context (rad/s for
/// angular velocities, N·m for torques).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, rhs: Self) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    #[inline]
    pub fn cross(self, rhs: Self) -> Self {
        Self {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.x, self.y, self.z)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub e: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Self = Self {
        e: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub const fn new(e: [[f64; 3]; 3]) -> Self {
        Self { e }
    }

    pub const fn diagonal(a: f64, b: f64, c: f64) -> Self {
        Self {
            e: [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]],
        }
    }

    pub fn transpose(self) -> Self {
        let m = self.e;
        Self {
            e: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn mul_vec(self, v: Vec3) -> Vec3 {
        let m = self.e;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn mul_mat(self, rhs: Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.e[i][k] * rhs.e[k][j]).sum();
            }
        }
        Self { e: out }
    }

    pub fn det(self) -> f64 {
        let m = self.e;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest absolute entry of `self - rhs`.
    pub fn max_abs_diff(self, rhs: Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.e[i][j] - rhs.e[i][j]).abs());
            }
        }
        worst
    }
}

/// Axis-angle decomposition of a unit quaternion.
///
/// `angle` is in `[0, 2*pi]`. When the vector part is degenerate (angle
/// within [`EPS_AXIS`] of `0` or `2*pi`) the axis is meaningless;
/// `axis_defined` is `false` and `axis` holds the placeholder `[1, 0, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub angle: f64,
    pub axis: Vec3,
    pub axis_defined: bool,
}

/// Scalar-first quaternion, `[m, n1, n2, n3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    /// Scalar part.
    pub m: f64,
    /// Vector part.
    pub n: Vec3,
}

impl Quat {
    pub const IDENTITY: Self = Self {
        m: 1.0,
        n: Vec3::ZERO,
    };
    pub const ZERO: Self = Self {
        m: 0.0,
        n: Vec3::ZERO,
    };

    #[inline]
    pub const fn new(m: f64, n1: f64, n2: f64, n3: f64) -> Self {
        Self {
            m,
            n: Vec3::new(n1, n2, n3),
        }
    }

    #[inline]
    pub const fn from_parts(m: f64, n: Vec3) -> Self {
        Self { m, n }
    }

    /// Quaternion with zero scalar part, used for angular-velocity kinematics.
    #[inline]
    pub const fn pure(v: Vec3) -> Self {
        Self { m: 0.0, n: v }
    }

    /// Rotation of `angle` radians about the unit axis `axis`.
    ///
    /// Round-trips with [`Quat::axis_angle`] for angles in
    /// `(EPS_AXIS, 2*pi - EPS_AXIS)`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, QuatError> {
        let norm = axis.norm();
        if (norm - 1.0).abs() > EPS_AXIS {
            return Err(QuatError::NonUnitAxis(norm));
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(Self { m: c, n: axis * s })
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.m * self.m + self.n.norm_squared()
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Conjugate `[m, -n]`; equals the inverse for unit quaternions.
    #[inline]
    pub fn conjugate(self) -> Self {
        Self {
            m: self.m,
            n: -self.n,
        }
    }

    /// Multiplicative inverse, `conjugate / norm^2`.
    pub fn inverse(self) -> Result<Self, QuatError> {
        let n2 = self.norm_squared();
        if n2 == 0.0 {
            return Err(QuatError::ZeroNorm);
        }
        let inv = 1.0 / n2;
        Ok(Self {
            m: self.m * inv,
            n: self.n * (-inv),
        })
    }

    /// Scale to unit norm, preserving direction.
    pub fn normalize(self) -> Result<Self, QuatError> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(QuatError::ZeroNorm);
        }
        let inv = 1.0 / norm;
        Ok(Self {
            m: self.m * inv,
            n: self.n * inv,
        })
    }

    pub fn is_finite(self) -> bool {
        self.m.is_finite() && self.n.is_finite()
    }

    /// Rotation matrix mapping body-frame vectors to inertial-frame vectors.
    ///
    /// Errors if the input is further than `1e-6` from unit norm.
    pub fn to_rotation_matrix(self) -> Result<Mat3, QuatError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(QuatError::NotUnit(norm));
        }
        Ok(self.rotation_matrix_raw())
    }

    /// R = (m^2 - n.n) I + 2 n n^T + 2 m [n]x, without the unit-norm gate.
    pub(crate) fn rotation_matrix_raw(self) -> Mat3 {
        let m = self.m;
        let Vec3 { x, y, z } = self.n;
        let d = m * m - (x * x + y * y + z * z);
        Mat3::new([
            [
                d + 2.0 * x * x,
                2.0 * (x * y - m * z),
                2.0 * (x * z + m * y),
            ],
            [
                2.0 * (x * y + m * z),
                d + 2.0 * y * y,
                2.0 * (y * z - m * x),
            ],
            [
                2.0 * (x * z - m * y),
                2.0 * (y * z + m * x),
                d + 2.0 * z * z,
            ],
        ])
    }

    /// Axis-angle decomposition with `angle = 2 * atan2(|n|, m)`.
    ///
    /// The atan2 form is stable where `angle` is near `0` or `2*pi`, which
    /// is exactly where `2*acos(m)` loses digits. No sign folding: the
    /// decomposition of `-q` has angle `2*pi - angle` and the opposite axis.
    pub fn axis_angle(self) -> AxisAngle {
        let vec_norm = self.n.norm();
        let angle = 2.0 * vec_norm.atan2(self.m);
        if vec_norm > EPS_AXIS {
            AxisAngle {
                angle,
                axis: self.n * (1.0 / vec_norm),
                axis_defined: true,
            }
        } else {
            AxisAngle {
                angle,
                axis: Vec3::new(1.0, 0.0, 0.0),
                axis_defined: false,
            }
        }
    }
}

impl Mul for Quat {
    type Output = Self;

    /// Hamilton product.
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self {
            m: self.m * rhs.m - self.n.dot(rhs.n),
            n: rhs.n * self.m + self.n * rhs.m + self.n.cross(rhs.n),
        }
    }
}

impl Add for Quat {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            m: self.m + rhs.m,
            n: self.n + rhs.n,
        }
    }
}

impl Mul<f64> for Quat {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self {
            m: self.m * s,
            n: self.n * s,
        }
    }
}

impl Neg for Quat {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            m: -self.m,
            n: -self.n,
        }
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.m, self.n.x, self.n.y, self.n.z)
    }
}
