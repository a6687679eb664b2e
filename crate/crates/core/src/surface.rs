//! Constant angle surfaces in H²×R ⊂ R³₁×R.
//!
//! For 0 < θ < π/2 and a unit-speed curve `f` on H the immersion is
//!
//! ```text
//! F(u, v) = ( cosh(u cosθ) f(v) + sinh(u cosθ) f(v) ⊠ f'(v),  u sinθ )
//! ```
//!
//! with unit normal `ξ = (−sinθ [sinh(u cosθ) f + cosh(u cosθ) f ⊠ f'], cosθ)`.
//! θ = 0 gives a horizontal slice H×{t0}, θ = π/2 the vertical cylinder over `f`.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::curve::{geodesic_curvature, HCurve};
use crate::diffgeo::SurfaceJet;
use crate::error::{Error, Result};
use crate::minkowski::{lorentz_dot, LVec3};

/// Smallest admissible metric factor β = ‖F_v‖ inside a surface domain.
pub const BETA_FLOOR: f64 = 1e-6;

const ANGLE_EPS: f64 = 1e-12;

/// A vector of R³₁×R with the product metric dx² + dy² − dz² + dt².
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AmbientVec {
    pub h: LVec3,
    pub t: f64,
}

/// A point of H×R, stored in the same representation as tangent vectors.
pub type AmbientPoint = AmbientVec;

impl AmbientVec {
    pub const ZERO: AmbientVec = AmbientVec { h: LVec3::ZERO, t: 0.0 };
    /// The unit vertical field ∂t.
    pub const DT: AmbientVec = AmbientVec { h: LVec3::ZERO, t: 1.0 };

    pub const fn new(h: LVec3, t: f64) -> Self {
        AmbientVec { h, t }
    }

    pub fn dot(self, o: AmbientVec) -> f64 {
        lorentz_dot(self.h, o.h) + self.t * o.t
    }

    /// The field ξ̃ = (p, 0), unit normal of H×R at this point.
    pub fn horizontal(self) -> AmbientVec {
        AmbientVec::new(self.h, 0.0)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.h.x, self.h.y, self.h.z, self.t]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        AmbientVec::new(LVec3::new(a[0], a[1], a[2]), a[3])
    }

    pub fn max_abs(self) -> f64 {
        self.h.max_abs().max(self.t.abs())
    }
}

impl Add for AmbientVec {
    type Output = AmbientVec;
    fn add(self, o: AmbientVec) -> AmbientVec {
        AmbientVec::new(self.h + o.h, self.t + o.t)
    }
}

impl Sub for AmbientVec {
    type Output = AmbientVec;
    fn sub(self, o: AmbientVec) -> AmbientVec {
        AmbientVec::new(self.h - o.h, self.t - o.t)
    }
}

impl Neg for AmbientVec {
    type Output = AmbientVec;
    fn neg(self) -> AmbientVec {
        AmbientVec::new(-self.h, -self.t)
    }
}

impl Mul<f64> for AmbientVec {
    type Output = AmbientVec;
    fn mul(self, s: f64) -> AmbientVec {
        AmbientVec::new(self.h * s, self.t * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SurfaceKind {
    /// 0 < θ < π/2: the general immersion.
    General,
    /// θ = 0: H×{t0}, charted by geodesic polar coordinates (u = radius, v = angle) about (0,0,1).
    SliceAtT0 { t0: f64 },
    /// θ = π/2: the curve times R, with u the R coordinate.
    Cylinder,
}

/// Angle, directrix curve and parameter domain of a constant angle surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceDescriptor", into = "SurfaceDescriptor")]
pub struct ConstantAngleSurface {
    theta: f64,
    curve: HCurve,
    u_range: (f64, f64),
    v_range: (f64, f64),
    kind: SurfaceKind,
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    if r.0.is_finite() && r.1.is_finite() && r.0 < r.1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} range must satisfy a < b, got [{}, {}]", r.0, r.1)))
    }
}

fn kind_for(theta: f64) -> Result<SurfaceKind> {
    if !(-ANGLE_EPS..=FRAC_PI_2 + ANGLE_EPS).contains(&theta) {
        return Err(Error::InvalidAngle { theta, reason: "expected 0 <= theta <= pi/2" });
    }
    Ok(if theta.abs() <= ANGLE_EPS {
        SurfaceKind::SliceAtT0 { t0: 0.0 }
    } else if (theta - FRAC_PI_2).abs() <= ANGLE_EPS {
        SurfaceKind::Cylinder
    } else {
        SurfaceKind::General
    })
}

/// Exact zeros of cosh(uc) − κ sinh(uc) for the extreme curvatures.
fn degeneracy_loci(bounds: (f64, f64), c: f64) -> Vec<f64> {
    [bounds.0, bounds.1].into_iter().filter(|k| k.abs() > 1.0).map(|k| (1.0 / k).atanh() / c).collect()
}

impl SurfaceKind {
    /// The kind a surface of angle θ gets from [`ConstantAngleSurface::new`].
    pub fn for_angle(theta: f64) -> Result<SurfaceKind> {
        kind_for(theta)
    }
}

impl ConstantAngleSurface {
    /// Builds a surface, selecting the kind from θ. Fails if the immersion
    /// degenerates (β < [`BETA_FLOOR`]) anywhere in `u_range`.
    pub fn new(theta: f64, curve: HCurve, u_range: (f64, f64), v_range: (f64, f64)) -> Result<Self> {
        let kind = kind_for(theta)?;
        Self::with_kind(theta, curve, u_range, v_range, kind)
    }

    pub fn with_kind(
        theta: f64,
        curve: HCurve,
        u_range: (f64, f64),
        v_range: (f64, f64),
        kind: SurfaceKind,
    ) -> Result<Self> {
        check_range("u", u_range)?;
        check_range("v", v_range)?;
        let expected = kind_for(theta)?;
        let theta = match (kind, expected) {
            (SurfaceKind::General, SurfaceKind::General) => theta,
            (SurfaceKind::SliceAtT0 { .. }, SurfaceKind::SliceAtT0 { .. }) => 0.0,
            (SurfaceKind::Cylinder, SurfaceKind::Cylinder) => FRAC_PI_2,
            _ => return Err(Error::InvalidAngle { theta, reason: "angle does not match the surface kind" }),
        };
        if let SurfaceKind::SliceAtT0 { t0 } = kind {
            if !t0.is_finite() {
                return Err(Error::InvalidArgument("t0 must be finite".into()));
            }
            if u_range.0 <= 0.0 {
                return Err(Error::InvalidArgument("slice chart needs a positive polar radius range".into()));
            }
        } else if let Some((lo, hi)) = curve.domain() {
            let slack = 1e-9 * (hi - lo);
            if v_range.0 < lo - slack || v_range.1 > hi + slack {
                return Err(Error::OutOfRange { value: if v_range.0 < lo { v_range.0 } else { v_range.1 }, lo, hi });
            }
        }
        let s = ConstantAngleSurface { theta, curve, u_range, v_range, kind };
        if kind == SurfaceKind::General {
            s.check_nondegenerate()?;
        }
        Ok(s)
    }

    /// Like [`ConstantAngleSurface::new`], but shrinks `u_range` to the largest
    /// sub-interval on which β ≥ [`BETA_FLOOR`] (preferring the piece containing u = 0).
    pub fn clipped(theta: f64, curve: HCurve, u_range: (f64, f64), v_range: (f64, f64)) -> Result<Self> {
        check_range("u", u_range)?;
        let kind = kind_for(theta)?;
        if kind != SurfaceKind::General {
            return Self::with_kind(theta, curve, u_range, v_range, kind);
        }
        let bounds = curve.curvature_bounds();
        let c = theta.cos();
        // small margin so the clipped range passes the strict check in `with_kind`
        let admissible = |u: f64| beta_floor_over(bounds, c, u) >= 1.001 * BETA_FLOOR;
        let mut grid: Vec<f64> = (0..=4000).map(|i| u_range.0 + (u_range.1 - u_range.0) * i as f64 / 4000.0).collect();
        // the zero set of β is too thin for the grid to find on its own
        grid.extend(degeneracy_loci(bounds, c).into_iter().filter(|u| *u > u_range.0 && *u < u_range.1));
        grid.sort_by(f64::total_cmp);
        let n = grid.len() - 1;
        // maximal runs of admissible grid points
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut start = None;
        for (i, &u) in grid.iter().enumerate() {
            match (admissible(u), start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push((s, i - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, n));
        }
        let pick = runs
            .iter()
            .find(|(a, b)| grid[*a] <= 0.0 && grid[*b] >= 0.0)
            .or_else(|| runs.iter().max_by_key(|(a, b)| b - a))
            .copied()
            .ok_or(Error::Degenerate { u: u_range.0, beta: 0.0 })?;
        let refine = |good: f64, bad: f64| {
            let (mut g, mut b) = (good, bad);
            for _ in 0..80 {
                let m = 0.5 * (g + b);
                if admissible(m) {
                    g = m;
                } else {
                    b = m;
                }
            }
            g
        };
        let lo = if pick.0 == 0 { u_range.0 } else { refine(grid[pick.0], grid[pick.0 - 1]) };
        let hi = if pick.1 == n { u_range.1 } else { refine(grid[pick.1], grid[pick.1 + 1]) };
        if !(hi > lo) {
            return Err(Error::Degenerate { u: lo, beta: 0.0 });
        }
        Self::with_kind(theta, curve, (lo, hi), v_range, kind)
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let bounds = self.curve.curvature_bounds();
        let c = self.theta.cos();
        let (a, b) = self.u_range;
        let mut probes: Vec<f64> = (0..=4000).map(|i| a + (b - a) * i as f64 / 4000.0).collect();
        probes.extend(degeneracy_loci(bounds, c).into_iter().filter(|u| *u >= a && *u <= b));
        for u in probes {
            let beta = beta_floor_over(bounds, c, u);
            if beta < BETA_FLOOR {
                return Err(Error::Degenerate { u, beta });
            }
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn curve(&self) -> &HCurve {
        &self.curve
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.v_range
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// Same curve and domain with a different angle (the kind must not change).
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::with_kind(theta, self.curve.clone(), self.u_range, self.v_range, self.kind)
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        let inside = |x: f64, (lo, hi): (f64, f64)| {
            let slack = 1e-9 * (1.0 + hi - lo);
            x >= lo - slack && x <= hi + slack
        };
        if !inside(u, self.u_range) {
            return Err(Error::OutOfRange { value: u, lo: self.u_range.0, hi: self.u_range.1 });
        }
        if !inside(v, self.v_range) {
            return Err(Error::OutOfRange { value: v, lo: self.v_range.0, hi: self.v_range.1 });
        }
        Ok(())
    }

    pub fn immerse(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        self.check_domain(u, v)?;
        Ok(match self.kind {
            SurfaceKind::General => {
                let j = self.curve.eval(v)?;
                let a = u * self.theta.cos();
                AmbientVec::new(j.f * a.cosh() + j.binormal() * a.sinh(), u * self.theta.sin())
            }
            SurfaceKind::SliceAtT0 { t0 } => AmbientVec::new(polar_point(u, v), t0),
            SurfaceKind::Cylinder => AmbientVec::new(self.curve.eval(v)?.f, u),
        })
    }

    /// Position with analytic first and second partial derivatives.
    pub fn immerse_jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        self.check_domain(u, v)?;
        let h = |x: LVec3| AmbientVec::new(x, 0.0);
        Ok(match self.kind {
            SurfaceKind::General => {
                let j = self.curve.eval(v)?;
                let kappa = geodesic_curvature(&j);
                let kappa_v = self.curve.curvature_rate(v)?;
                let (s, c) = self.theta.sin_cos();
                let a = u * c;
                let (sh, ch) = (a.sinh(), a.cosh());
                let g = j.binormal();
                let stretch = ch - kappa * sh;
                SurfaceJet {
                    f: AmbientVec::new(j.f * ch + g * sh, u * s),
                    fu: AmbientVec::new((j.f * sh + g * ch) * c, s),
                    fv: h(j.df * stretch),
                    fuu: h((j.f * ch + g * sh) * (c * c)),
                    fuv: h(j.df * (c * (sh - kappa * ch))),
                    fvv: h(j.df * (-kappa_v * sh) + j.ddf * stretch),
                }
            }
            SurfaceKind::SliceAtT0 { t0 } => {
                let (sr, cr) = (u.sinh(), u.cosh());
                let (sp, cp) = v.sin_cos();
                let p = polar_point(u, v);
                SurfaceJet {
                    f: AmbientVec::new(p, t0),
                    fu: h(LVec3::new(cr * cp, cr * sp, sr)),
                    fv: h(LVec3::new(-sr * sp, sr * cp, 0.0)),
                    fuu: h(p),
                    fuv: h(LVec3::new(-cr * sp, cr * cp, 0.0)),
                    fvv: h(LVec3::new(-sr * cp, -sr * sp, 0.0)),
                }
            }
            SurfaceKind::Cylinder => {
                let j = self.curve.eval(v)?;
                SurfaceJet {
                    f: AmbientVec::new(j.f, u),
                    fu: AmbientVec::DT,
                    fv: h(j.df),
                    fuu: AmbientVec::ZERO,
                    fuv: AmbientVec::ZERO,
                    fvv: h(j.ddf),
                }
            }
        })
    }

    /// The unit normal in closed form. For the trivial kinds this is ∂t
    /// (slice) and (f ⊠ f', 0) (cylinder).
    pub fn normal_xi(&self, u: f64, v: f64) -> Result<AmbientVec> {
        self.check_domain(u, v)?;
        Ok(match self.kind {
            SurfaceKind::General => {
                let j = self.curve.eval(v)?;
                let (s, c) = self.theta.sin_cos();
                let a = u * c;
                AmbientVec::new((j.f * a.sinh() + j.binormal() * a.cosh()) * -s, c)
            }
            SurfaceKind::SliceAtT0 { .. } => AmbientVec::DT,
            SurfaceKind::Cylinder => AmbientVec::new(self.curve.eval(v)?.binormal(), 0.0),
        })
    }

    /// Closed-form β = ‖F_v‖ at (u, v).
    pub fn beta(&self, u: f64, v: f64) -> Result<f64> {
        self.check_domain(u, v)?;
        Ok(match self.kind {
            SurfaceKind::General => closed_form_beta(self.theta, self.curve.curvature(v)?, u),
            SurfaceKind::SliceAtT0 { .. } => u.sinh(),
            SurfaceKind::Cylinder => 1.0,
        })
    }
}

fn polar_point(r: f64, phi: f64) -> LVec3 {
    let s = r.sinh();
    LVec3::new(s * phi.cos(), s * phi.sin(), r.cosh())
}

/// Lower bound of |cosh(uc) − κ sinh(uc)| over κ ∈ [k.0, k.1].
fn beta_floor_over(k: (f64, f64), c: f64, u: f64) -> f64 {
    let a = u * c;
    let b0 = a.cosh() - k.0 * a.sinh();
    let b1 = a.cosh() - k.1 * a.sinh();
    if b0.signum() != b1.signum() {
        0.0
    } else {
        b0.abs().min(b1.abs())
    }
}

fn check_open_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidAngle { theta, reason: "closed forms need 0 < theta < pi/2" })
    }
}

/// Integration constants of λ and β along one u-line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormParams {
    /// λ = sinθ tanh(u cosθ + C), β = D cosh(u cosθ + C); |κ| < 1.
    Tanh { c: f64, d: f64 },
    /// λ = sign·sinθ, β = D e^{sign·u cosθ}; |κ| = 1.
    Const { sign: f64, d: f64 },
    /// λ = sinθ coth(u cosθ + C), β = D sinh(u cosθ + C); |κ| > 1.
    Coth { c: f64, d: f64 },
}

/// Curvatures within this distance of ±1 use the constant branch.
pub const HOROCYCLIC_EPS: f64 = 1e-12;

impl ClosedFormParams {
    /// Constants for the u-line over a curve point of geodesic curvature κ,
    /// normalized so that β = 1 at u = 0.
    pub fn for_curvature(kappa: f64) -> Self {
        if (kappa.abs() - 1.0).abs() <= HOROCYCLIC_EPS {
            ClosedFormParams::Const { sign: -kappa.signum(), d: 1.0 }
        } else if kappa.abs() < 1.0 {
            let c = (-kappa).atanh();
            ClosedFormParams::Tanh { c, d: 1.0 / c.cosh() }
        } else {
            let c = (-1.0 / kappa).atanh();
            ClosedFormParams::Coth { c, d: 1.0 / c.sinh() }
        }
    }

    pub fn lambda(&self, theta: f64, u: f64) -> f64 {
        let (s, co) = theta.sin_cos();
        match *self {
            ClosedFormParams::Tanh { c, .. } => s * (u * co + c).tanh(),
            ClosedFormParams::Const { sign, .. } => sign * s,
            ClosedFormParams::Coth { c, .. } => s / (u * co + c).tanh(),
        }
    }

    pub fn beta(&self, theta: f64, u: f64) -> f64 {
        let co = theta.cos();
        match *self {
            ClosedFormParams::Tanh { c, d } => d * (u * co + c).cosh(),
            ClosedFormParams::Const { sign, d } => d * (sign * u * co).exp(),
            ClosedFormParams::Coth { c, d } => d * (u * co + c).sinh(),
        }
    }
}

/// Nonzero principal curvature along the u-line over a curve point of curvature κ.
pub fn closed_form_lambda(theta: f64, kappa: f64, u: f64) -> Result<f64> {
    check_open_angle(theta)?;
    Ok(ClosedFormParams::for_curvature(kappa).lambda(theta, u))
}

/// β = |cosh(u cosθ) − κ sinh(u cosθ)|, the length of F_v for a unit-speed curve.
/// Vanishes on the degeneracy locus tanh(u cosθ) = 1/κ.
pub fn closed_form_beta(theta: f64, kappa: f64, u: f64) -> f64 {
    let a = u * theta.cos();
    (a.cosh() - kappa * a.sinh()).abs()
}

/// Wire form of [`ConstantAngleSurface`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    /// Angle in radians.
    pub theta: f64,
    pub curve: HCurve,
    pub u: [f64; 2],
    pub v: [f64; 2],
    /// "general", "slice" or "cylinder".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

impl TryFrom<SurfaceDescriptor> for ConstantAngleSurface {
    type Error = Error;
    fn try_from(d: SurfaceDescriptor) -> Result<Self> {
        let kind = match d.kind.as_str() {
            "general" => SurfaceKind::General,
            "slice" => SurfaceKind::SliceAtT0 { t0: d.t0.unwrap_or(0.0) },
            "cylinder" => SurfaceKind::Cylinder,
            other => return Err(Error::Parse(format!("unknown surface kind {other:?}"))),
        };
        ConstantAngleSurface::with_kind(d.theta, d.curve, (d.u[0], d.u[1]), (d.v[0], d.v[1]), kind)
    }
}

impl From<ConstantAngleSurface> for SurfaceDescriptor {
    fn from(s: ConstantAngleSurface) -> Self {
        let (kind, t0) = match s.kind {
            SurfaceKind::General => ("general", None),
            SurfaceKind::SliceAtT0 { t0 } => ("slice", Some(t0)),
            SurfaceKind::Cylinder => ("cylinder", None),
        };
        SurfaceDescriptor {
            theta: s.theta,
            curve: s.curve,
            u: [s.u_range.0, s.u_range.1],
            v: [s.v_range.0, s.v_range.1],
            kind: kind.into(),
            t0,
        }
    }
}
