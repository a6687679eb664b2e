//! Minkowski 3-space R³₁ with metric dx² + dy² − dz² and the hyperboloid
//! model of the hyperbolic plane, the upper sheet of x² + y² − z² = −1.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for hyperboloid membership of analytically computed points.
pub const HYPERBOLOID_TOL: f64 = 1e-9;

/// A vector in Minkowski 3-space, signature (+, +, −).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LVec3 {
    pub const ZERO: LVec3 = LVec3 { x: 0.0, y: 0.0, z: 0.0 };
    /// The base point (0, 0, 1) of the hyperboloid.
    pub const ORIGIN: LVec3 = LVec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        LVec3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        LVec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: LVec3) -> f64 {
        lorentz_dot(self, other)
    }

    pub fn cross(self, other: LVec3) -> LVec3 {
        lorentz_cross(self, other)
    }

    /// Lorentzian squared norm ⟨v, v⟩ (may be negative).
    pub fn norm_sq(self) -> f64 {
        lorentz_dot(self, self)
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for LVec3 {
    type Output = LVec3;
    fn add(self, o: LVec3) -> LVec3 {
        LVec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for LVec3 {
    fn add_assign(&mut self, o: LVec3) {
        *self = *self + o;
    }
}

impl Sub for LVec3 {
    type Output = LVec3;
    fn sub(self, o: LVec3) -> LVec3 {
        LVec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for LVec3 {
    type Output = LVec3;
    fn neg(self) -> LVec3 {
        LVec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for LVec3 {
    type Output = LVec3;
    fn mul(self, s: f64) -> LVec3 {
        LVec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<LVec3> for f64 {
    type Output = LVec3;
    fn mul(self, v: LVec3) -> LVec3 {
        v * self
    }
}

impl Div<f64> for LVec3 {
    type Output = LVec3;
    fn div(self, s: f64) -> LVec3 {
        LVec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A point on the upper sheet of the hyperboloid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LVec3", into = "LVec3")]
pub struct HPoint(LVec3);

impl HPoint {
    pub const ORIGIN: HPoint = HPoint(LVec3::ORIGIN);

    /// Accepts `v` if it lies on the hyperboloid within `tol`.
    pub fn new(v: LVec3, tol: f64) -> Result<Self> {
        if on_hyperboloid(v, tol) {
            Ok(HPoint(v))
        } else {
            Err(Error::NotOnHyperboloid { point: v.to_array(), defect: v.norm_sq() + 1.0 })
        }
    }

    pub fn vec(self) -> LVec3 {
        self.0
    }
}

impl TryFrom<LVec3> for HPoint {
    type Error = Error;
    fn try_from(v: LVec3) -> Result<Self> {
        HPoint::new(v, HYPERBOLOID_TOL)
    }
}

impl From<HPoint> for LVec3 {
    fn from(p: HPoint) -> LVec3 {
        p.0
    }
}

pub fn lorentz_dot(a: LVec3, b: LVec3) -> f64 {
    a.x * b.x + a.y * b.y - a.z * b.z
}

/// Lorentzian cross product. The third component is `a.y*b.x - a.x*b.y`,
/// the opposite of the Euclidean convention; the result is Lorentz-orthogonal
/// to both factors.
pub fn lorentz_cross(a: LVec3, b: LVec3) -> LVec3 {
    LVec3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.y * b.x - a.x * b.y)
}

pub fn on_hyperboloid(p: LVec3, tol: f64) -> bool {
    p.is_finite() && (p.norm_sq() + 1.0).abs() <= tol && p.z > 0.0
}

/// Rescales a future-pointing timelike vector onto the hyperboloid.
pub fn project_to_hyperboloid(p: LVec3) -> Result<HPoint> {
    let n = p.norm_sq();
    if !(n < 0.0) || !(p.z > 0.0) || !p.is_finite() {
        return Err(Error::NotTimelike { point: p.to_array() });
    }
    Ok(HPoint(p / (-n).sqrt()))
}
