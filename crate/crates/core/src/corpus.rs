//! The fixed set of surfaces used by the acceptance suite.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::curve::{reparametrize_unit_speed, HCurve};
use crate::error::Result;
use crate::minkowski::LVec3;
use crate::surface::ConstantAngleSurface;

pub const ANGLES_DEG: [f64; 3] = [30.0, 45.0, 60.0];
pub const SAMPLED_POINTS: usize = 256;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub surface: ConstantAngleSurface,
}

/// A smooth closed curve given only by samples: polar radius 1 + 0.2 sin φ about the origin.
pub fn sampled_closed_curve() -> Result<HCurve> {
    let pts: Vec<LVec3> = (0..SAMPLED_POINTS)
        .map(|i| {
            let phi = TAU * i as f64 / SAMPLED_POINTS as f64;
            let r = 1.0 + 0.2 * phi.sin();
            LVec3::new(r.sinh() * phi.cos(), r.sinh() * phi.sin(), r.cosh())
        })
        .collect();
    Ok(HCurve::Sampled(reparametrize_unit_speed(&pts, true)?))
}

/// Directrices with their v-ranges: one per curvature regime plus a sampled curve.
pub fn curves() -> Result<Vec<(HCurve, (f64, f64))>> {
    let circle = HCurve::circle(1.0)?;
    let circle_period = circle.period().unwrap_or(TAU);
    let sampled = sampled_closed_curve()?;
    let sampled_len = sampled.period().unwrap_or(1.0);
    Ok(vec![
        (HCurve::Geodesic, (-1.0, 1.0)),
        (HCurve::hypercycle(0.5)?, (-1.0, 1.0)),
        (HCurve::Horocycle, (-1.0, 1.0)),
        (circle, (0.0, circle_period)),
        (sampled, (0.0, sampled_len)),
    ])
}

/// The 15 general surfaces: every corpus curve at 30°, 45° and 60°, u ∈ [−0.5, 0.5].
pub fn general() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for (curve, v) in curves()? {
        for deg in ANGLES_DEG {
            let surface = ConstantAngleSurface::new(deg.to_radians(), curve.clone(), (-0.5, 0.5), v)?;
            out.push(CorpusEntry { label: format!("{}@{deg}deg", curve.name()), surface });
        }
    }
    Ok(out)
}

/// Horizontal slice, cylinder over a geodesic and cylinder over a circle.
pub fn trivial() -> Result<Vec<CorpusEntry>> {
    let circle = HCurve::circle(1.0)?;
    let period = circle.period().unwrap_or(TAU);
    Ok(vec![
        CorpusEntry {
            label: "slice@0deg".into(),
            surface: ConstantAngleSurface::new(0.0, HCurve::Geodesic, (0.2, 1.5), (0.0, TAU))?,
        },
        CorpusEntry {
            label: "geodesic@90deg".into(),
            surface: ConstantAngleSurface::new(FRAC_PI_2, HCurve::Geodesic, (-1.0, 1.0), (-1.0, 1.0))?,
        },
        CorpusEntry {
            label: format!("{}@90deg", circle.name()),
            surface: ConstantAngleSurface::new(FRAC_PI_2, circle, (-1.0, 1.0), (0.0, period))?,
        },
    ])
}

pub fn all() -> Result<Vec<CorpusEntry>> {
    let mut out = general()?;
    out.extend(trivial()?);
    Ok(out)
}
