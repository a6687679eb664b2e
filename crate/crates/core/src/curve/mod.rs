//! Unit-speed curves on the hyperboloid.
//!
//! A curve is consumed through its [`CurveJet`]: position, unit tangent and
//! second derivative with respect to arclength. For a unit-speed curve on H
//! the second derivative has the Frenet form `f'' = f + κ·(f ⊠ f')`, where κ
//! is the geodesic curvature.

mod sampled;

pub use sampled::{load_points, parse_points, reparametrize_unit_speed, SampledCurve, MIN_SAMPLES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{lorentz_cross, lorentz_dot, LVec3};

/// Position and first two arclength derivatives of a curve on H.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveJet {
    pub f: LVec3,
    pub df: LVec3,
    pub ddf: LVec3,
}

impl CurveJet {
    /// `f ⊠ f'`, the unit normal of the curve inside H.
    pub fn binormal(&self) -> LVec3 {
        lorentz_cross(self.f, self.df)
    }

    /// Largest violation of ⟨f,f⟩ = −1, ⟨f,f'⟩ = 0, ⟨f',f'⟩ = 1, ⟨f,f''⟩ = −1.
    pub fn invariant_defect(&self) -> f64 {
        [
            (lorentz_dot(self.f, self.f) + 1.0).abs(),
            lorentz_dot(self.f, self.df).abs(),
            (lorentz_dot(self.df, self.df) - 1.0).abs(),
            (lorentz_dot(self.f, self.ddf) + 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Residual of the Frenet identity `f'' − f − κ (f ⊠ f')`.
    pub fn frenet_defect(&self) -> f64 {
        let k = geodesic_curvature(self);
        (self.ddf - self.f - self.binormal() * k).max_abs()
    }
}

/// Geodesic curvature κ = ⟨f'', f ⊠ f'⟩.
pub fn geodesic_curvature(j: &CurveJet) -> f64 {
    lorentz_dot(j.ddf, j.binormal())
}

/// A unit-speed curve on the hyperboloid.
///
/// The analytic variants are fixed representatives of their isometry class:
/// the geodesic through (0,0,1) with direction (1,0,0), the hypercycle at
/// distance `d` from it, the horocycle through (0,0,1) and the circle of
/// radius `rho` centred at (0,0,1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveSpec", into = "CurveSpec")]
pub enum HCurve {
    Geodesic,
    Hypercycle { d: f64 },
    Horocycle,
    HCircle { rho: f64 },
    Sampled(SampledCurve),
}

impl HCurve {
    pub fn hypercycle(d: f64) -> Result<Self> {
        if d > 0.0 && d.is_finite() {
            Ok(HCurve::Hypercycle { d })
        } else {
            Err(Error::InvalidArgument(format!("hypercycle distance must be positive, got {d}")))
        }
    }

    pub fn circle(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho.is_finite() {
            Ok(HCurve::HCircle { rho })
        } else {
            Err(Error::InvalidArgument(format!("circle radius must be positive, got {rho}")))
        }
    }

    pub fn name(&self) -> String {
        match self {
            HCurve::Geodesic => "geodesic".into(),
            HCurve::Hypercycle { d } => format!("hypercycle:{d}"),
            HCurve::Horocycle => "horocycle".into(),
            HCurve::HCircle { rho } => format!("circle:{rho}"),
            HCurve::Sampled(s) => format!("sampled[{}]", s.len()),
        }
    }

    pub fn eval(&self, v: f64) -> Result<CurveJet> {
        Ok(match *self {
            HCurve::Geodesic => {
                let (s, c) = (v.sinh(), v.cosh());
                let f = LVec3::new(s, 0.0, c);
                CurveJet { f, df: LVec3::new(c, 0.0, s), ddf: f }
            }
            HCurve::Hypercycle { d } => {
                let (sd, cd) = (d.sinh(), d.cosh());
                let w = v / cd;
                let (s, c) = (w.sinh(), w.cosh());
                CurveJet {
                    f: LVec3::new(sd, cd * s, cd * c),
                    df: LVec3::new(0.0, c, s),
                    ddf: LVec3::new(0.0, s / cd, c / cd),
                }
            }
            HCurve::Horocycle => CurveJet {
                f: LVec3::new(v, 0.5 * v * v, 1.0 + 0.5 * v * v),
                df: LVec3::new(1.0, v, v),
                ddf: LVec3::new(0.0, 1.0, 1.0),
            },
            HCurve::HCircle { rho } => {
                let (sr, cr) = (rho.sinh(), rho.cosh());
                let w = v / sr;
                let (s, c) = (w.sin(), w.cos());
                CurveJet {
                    f: LVec3::new(sr * c, sr * s, cr),
                    df: LVec3::new(-s, c, 0.0),
                    ddf: LVec3::new(-c / sr, -s / sr, 0.0),
                }
            }
            HCurve::Sampled(ref s) => return s.eval(v),
        })
    }

    pub fn curvature(&self, v: f64) -> Result<f64> {
        Ok(geodesic_curvature(&self.eval(v)?))
    }

    /// dκ/dv. Zero for the analytic families.
    pub fn curvature_rate(&self, v: f64) -> Result<f64> {
        match self {
            HCurve::Sampled(s) => s.curvature_rate(v),
            _ => Ok(0.0),
        }
    }

    /// Arclength period of a closed curve.
    pub fn period(&self) -> Option<f64> {
        match self {
            HCurve::HCircle { rho } => Some(std::f64::consts::TAU * rho.sinh()),
            HCurve::Sampled(s) if s.is_closed() => Some(s.length()),
            _ => None,
        }
    }

    /// Admissible arclength interval, `None` when every real `v` is allowed.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            HCurve::Sampled(s) if !s.is_closed() => Some((0.0, s.length())),
            _ => None,
        }
    }

    /// Whether κ is identically zero (checked analytically, or on the nodes of a sampled curve).
    pub fn is_geodesic(&self) -> bool {
        match self {
            HCurve::Geodesic => true,
            HCurve::Sampled(s) => s.max_abs_curvature() < 1e-9,
            _ => false,
        }
    }

    /// Minimum and maximum κ over the curve (sampled on the nodes for sampled curves).
    pub fn curvature_bounds(&self) -> (f64, f64) {
        match self {
            HCurve::Sampled(s) => s.curvature_bounds(),
            other => {
                let k = other.curvature(0.0).unwrap_or(0.0);
                (k, k)
            }
        }
    }
}

/// Wire form of [`HCurve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CurveSpec {
    Geodesic,
    Hypercycle { d: f64 },
    Horocycle,
    Circle { rho: f64 },
    Sampled { points: Vec<[f64; 3]>, closed: bool },
}

impl TryFrom<CurveSpec> for HCurve {
    type Error = Error;
    fn try_from(spec: CurveSpec) -> Result<Self> {
        match spec {
            CurveSpec::Geodesic => Ok(HCurve::Geodesic),
            CurveSpec::Hypercycle { d } => HCurve::hypercycle(d),
            CurveSpec::Horocycle => Ok(HCurve::Horocycle),
            CurveSpec::Circle { rho } => HCurve::circle(rho),
            CurveSpec::Sampled { points, closed } => {
                let pts: Vec<LVec3> = points.into_iter().map(LVec3::from_array).collect();
                Ok(HCurve::Sampled(reparametrize_unit_speed(&pts, closed)?))
            }
        }
    }
}

impl From<HCurve> for CurveSpec {
    fn from(c: HCurve) -> Self {
        match c {
            HCurve::Geodesic => CurveSpec::Geodesic,
            HCurve::Hypercycle { d } => CurveSpec::Hypercycle { d },
            HCurve::Horocycle => CurveSpec::Horocycle,
            HCurve::HCircle { rho } => CurveSpec::Circle { rho },
            HCurve::Sampled(s) => CurveSpec::Sampled {
                points: s.raw_points().iter().map(|p| p.to_array()).collect(),
                closed: s.is_closed(),
            },
        }
    }
}
