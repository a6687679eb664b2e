//! Invariant suite: every expected property of a constant angle surface,
//! measured on a parameter grid and collected into a JSON report.

mod checks;
mod subject;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::HCurve;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::surface::ConstantAngleSurface;

pub use checks::principal_residual;
pub use subject::{Corruption, Subject, SubjectDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Angle,
    GaussExtrinsic,
    GaussIntrinsic,
    PrincipalDirection,
    Codazzi,
    BetaPde,
    Connection,
    Structure,
    HyperboloidShape,
    Minimality,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::Angle,
        CheckId::GaussExtrinsic,
        CheckId::GaussIntrinsic,
        CheckId::PrincipalDirection,
        CheckId::Codazzi,
        CheckId::BetaPde,
        CheckId::Connection,
        CheckId::Structure,
        CheckId::HyperboloidShape,
        CheckId::Minimality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Angle => "angle",
            CheckId::GaussExtrinsic => "gauss_extrinsic",
            CheckId::GaussIntrinsic => "gauss_intrinsic",
            CheckId::PrincipalDirection => "principal_direction",
            CheckId::Codazzi => "codazzi",
            CheckId::BetaPde => "beta_pde",
            CheckId::Connection => "connection",
            CheckId::Structure => "structure",
            CheckId::HyperboloidShape => "hyperboloid_shape",
            CheckId::Minimality => "minimality",
        }
    }

    pub fn from_name(name: &str) -> Option<CheckId> {
        CheckId::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-check tolerances. FD-based entries follow from the 4th-order stencil at
/// h = 1e−2 (truncation ~h⁴ plus cancellation ~ε/h²); analytic ones from roundoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub angle: f64,
    pub gauss_extrinsic: f64,
    pub gauss_intrinsic: f64,
    pub principal_direction: f64,
    pub codazzi: f64,
    pub beta_pde: f64,
    pub connection: f64,
    pub structure: f64,
    pub hyperboloid_shape: f64,
    /// ‖A‖ bound for totally geodesic surfaces.
    pub totally_geodesic: f64,
    /// |Hm − κ/2| bound for cylinders over curved directrices.
    pub mean_curvature: f64,
    /// General surfaces must reach max |Hm| at least this large. Not scaled.
    pub nonminimal_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            angle: 1e-10,
            gauss_extrinsic: 1e-9,
            gauss_intrinsic: 1e-4,
            principal_direction: 1e-8,
            codazzi: 1e-6,
            beta_pde: 1e-6,
            connection: 1e-5,
            structure: 1e-5,
            hyperboloid_shape: 1e-8,
            totally_geodesic: 1e-9,
            mean_curvature: 1e-9,
            nonminimal_threshold: 0.05,
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, k: f64) -> Self {
        Tolerances {
            angle: self.angle * k,
            gauss_extrinsic: self.gauss_extrinsic * k,
            gauss_intrinsic: self.gauss_intrinsic * k,
            principal_direction: self.principal_direction * k,
            codazzi: self.codazzi * k,
            beta_pde: self.beta_pde * k,
            connection: self.connection * k,
            structure: self.structure * k,
            hyperboloid_shape: self.hyperboloid_shape * k,
            totally_geodesic: self.totally_geodesic * k,
            mean_curvature: self.mean_curvature * k,
            nonminimal_threshold: self.nonminimal_threshold,
        }
    }
}

/// Uniform nu×nv grid over the surface domain, shrunk by `margin`·h on every
/// side so the finite-difference stencils stay inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nu: usize,
    pub nv: usize,
    /// Finite-difference step.
    pub h: f64,
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nu: 41, nv: 41, h: 1e-2, margin: 4.0 }
    }
}

impl GridSpec {
    pub fn new(nu: usize, nv: usize) -> Self {
        GridSpec { nu, nv, ..GridSpec::default() }
    }

    /// Grid points, row-major in u.
    pub fn points(&self, s: &ConstantAngleSurface) -> Result<Vec<(f64, f64)>> {
        if self.nu == 0 || self.nv == 0 {
            return Err(Error::InvalidArgument("verification grid is empty".into()));
        }
        if !(self.h > 0.0 && self.h.is_finite()) || !(self.margin >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad step {} or margin {}", self.h, self.margin)));
        }
        let pad = self.margin * self.h;
        let axis = |(lo, hi): (f64, f64), n: usize| -> Result<Vec<f64>> {
            let (a, b) = (lo + pad, hi - pad);
            if !(b >= a) {
                return Err(Error::InvalidArgument(format!("domain [{lo}, {hi}] too small for the stencil margin")));
            }
            Ok(if n == 1 {
                vec![0.5 * (a + b)]
            } else {
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            })
        };
        let us = axis(s.u_range(), self.nu)?;
        let vs = axis(s.v_range(), self.nv)?;
        Ok(us.iter().flat_map(|&u| vs.iter().map(move |&v| (u, v))).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Option<[f64; 2]>,
    /// Grid points that contributed a residual.
    pub evaluated: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: Subject,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn check(&self, id: CheckId) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == id.name())
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs one check.
pub fn run_check(
    id: CheckId,
    subject: &Subject,
    grid: &GridSpec,
    tol: &Tolerances,
    exec: Execution,
) -> Result<CheckRecord> {
    let ctx = checks::Ctx::new(subject, grid, tol, exec)?;
    ctx.run(id)
}

/// Runs every check with the default execution mode.
pub fn run_all(subject: &Subject, grid: &GridSpec, tol: &Tolerances) -> Result<VerificationReport> {
    run_all_with(subject, grid, tol, Execution::default())
}

pub fn run_all_with(
    subject: &Subject,
    grid: &GridSpec,
    tol: &Tolerances,
    exec: Execution,
) -> Result<VerificationReport> {
    let ctx = checks::Ctx::new(subject, grid, tol, exec)?;
    let checks = CheckId::ALL.iter().map(|&id| ctx.run(id)).collect::<Result<Vec<_>>>()?;
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport { subject: subject.clone(), grid: *grid, tolerances: *tol, checks, pass })
}

/// The documented corruption that each check must detect, applied to a surface
/// on which the uncorrupted check passes.
pub fn negative_control(id: CheckId) -> Subject {
    let general = |theta: f64| {
        ConstantAngleSurface::new(theta, HCurve::Geodesic, (-0.5, 0.5), (-1.0, 1.0)).expect("valid surface")
    };
    let (surface, corruption) = match id {
        CheckId::Angle | CheckId::GaussExtrinsic | CheckId::GaussIntrinsic | CheckId::HyperboloidShape => {
            (general(FRAC_PI_4), Corruption::ScaleHyperboloid { amount: 0.01 })
        }
        CheckId::Codazzi | CheckId::BetaPde | CheckId::Connection | CheckId::Structure => {
            (general(FRAC_PI_3), Corruption::AngleMismatch { delta: 0.05 })
        }
        CheckId::PrincipalDirection => (general(FRAC_PI_4), Corruption::HeightWarp { amount: 0.2 }),
        CheckId::Minimality => (
            ConstantAngleSurface::new(0.0, HCurve::Geodesic, (0.2, 1.5), (0.0, std::f64::consts::TAU))
                .expect("valid slice"),
            Corruption::HeightWarp { amount: 0.2 },
        ),
    };
    Subject::new(surface).corrupted(corruption).expect("finite corruption")
}
