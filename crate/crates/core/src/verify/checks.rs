use std::collections::BTreeMap;

use super::{CheckId, CheckRecord, GridSpec, Subject, Tolerances};
use crate::diffgeo::{
    christoffel, first_fundamental, fundamental_data, gauss_curvature_intrinsic, hyperboloid_shape, FundamentalData,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::stencil::{d1, partials1};
use crate::surface::SurfaceKind;

/// Both principal curvatures below this mark a totally geodesic point.
const FLAT_EPS: f64 = 1e-10;
/// T shorter than this (θ = 0) leaves the principal direction undefined.
const T_EPS: f64 = 1e-12;

/// ‖A·T‖ / ‖T‖ in the induced metric, or `None` where T vanishes.
pub fn principal_residual(fd: &FundamentalData) -> Option<f64> {
    let tn = fd.t_norm_sq().max(0.0).sqrt();
    if tn < T_EPS {
        return None;
    }
    let at = fd.apply(fd.t);
    Some(fd.metric_dot(at, at).max(0.0).sqrt() / tn)
}

struct Sweep<const N: usize> {
    max: f64,
    worst: Option<(f64, f64)>,
    components: [f64; N],
    evaluated: usize,
}

fn sanitize(x: f64) -> f64 {
    if x.is_nan() || x.is_infinite() {
        f64::MAX
    } else {
        x
    }
}

pub(super) struct Ctx<'a> {
    subject: &'a Subject,
    grid: &'a GridSpec,
    tol: &'a Tolerances,
    exec: Execution,
    points: Vec<(f64, f64)>,
    theta: f64,
}

impl<'a> Ctx<'a> {
    pub(super) fn new(subject: &'a Subject, grid: &'a GridSpec, tol: &'a Tolerances, exec: Execution) -> Result<Self> {
        let points = grid.points(subject.surface())?;
        Ok(Ctx { subject, grid, tol, exec, points, theta: subject.declared_theta() })
    }

    fn data(&self, u: f64, v: f64) -> Result<FundamentalData> {
        fundamental_data(&self.subject.jet(u, v)?)
    }

    fn metric(&self, u: f64, v: f64) -> Result<(f64, f64, f64)> {
        first_fundamental(&self.subject.jet(u, v)?)
    }

    fn is_slice(&self) -> bool {
        matches!(self.subject.surface().kind(), SurfaceKind::SliceAtT0 { .. })
    }

    /// Evaluates `f` on every grid point (in parallel when enabled) and reduces
    /// in grid order. `None` skips a point.
    fn sweep<const N: usize, F>(&self, f: F) -> Result<Sweep<N>>
    where
        F: Fn(f64, f64) -> Result<Option<[f64; N]>> + Sync + Send,
    {
        let values = self.exec.map(&self.points, |&(u, v)| f(u, v));
        let mut out = Sweep { max: 0.0, worst: None, components: [0.0; N], evaluated: 0 };
        for (&(u, v), r) in self.points.iter().zip(values) {
            let Some(comps) = r? else { continue };
            out.evaluated += 1;
            for (acc, c) in out.components.iter_mut().zip(comps) {
                *acc = acc.max(sanitize(c.abs()));
            }
            let here = comps.iter().fold(0.0f64, |m, c| m.max(sanitize(c.abs())));
            if out.worst.is_none() || here > out.max {
                out.max = here;
                out.worst = Some((u, v));
            }
        }
        Ok(out)
    }

    fn record<const N: usize>(&self, id: CheckId, s: Sweep<N>, tolerance: f64, names: [&str; N]) -> CheckRecord {
        let mut metrics = BTreeMap::new();
        if N > 1 {
            for (n, c) in names.iter().zip(s.components) {
                metrics.insert((*n).to_string(), c);
            }
        }
        CheckRecord {
            name: id.name().into(),
            max_residual: s.max,
            tolerance,
            pass: s.max <= tolerance,
            worst_point: s.worst.map(|(u, v)| [u, v]),
            evaluated: s.evaluated,
            metrics,
            note: None,
        }
    }

    fn skipped(&self, id: CheckId, tolerance: f64, why: &str) -> CheckRecord {
        CheckRecord {
            name: id.name().into(),
            max_residual: 0.0,
            tolerance,
            pass: true,
            worst_point: None,
            evaluated: 0,
            metrics: BTreeMap::new(),
            note: Some(format!("skipped: {why}")),
        }
    }

    pub(super) fn run(&self, id: CheckId) -> Result<CheckRecord> {
        match id {
            CheckId::Angle => self.angle(),
            CheckId::GaussExtrinsic => self.gauss_extrinsic(),
            CheckId::GaussIntrinsic => self.gauss_intrinsic(),
            CheckId::PrincipalDirection => self.principal_direction(),
            CheckId::Codazzi => self.codazzi(),
            CheckId::BetaPde => self.beta_pde(),
            CheckId::Connection => self.connection(),
            CheckId::Structure => self.structure(),
            CheckId::HyperboloidShape => self.hyperboloid_shape(),
            CheckId::Minimality => self.minimality(),
        }
    }

    fn angle(&self) -> Result<CheckRecord> {
        let c = self.theta.cos();
        let s = self.sweep(|u, v| Ok(Some([self.data(u, v)?.cos_angle() - c])))?;
        Ok(self.record(CheckId::Angle, s, self.tol.angle, ["cos"]))
    }

    fn gauss_extrinsic(&self) -> Result<CheckRecord> {
        let k = -self.theta.cos().powi(2);
        let s = self.sweep(|u, v| Ok(Some([self.data(u, v)?.k - k])))?;
        Ok(self.record(CheckId::GaussExtrinsic, s, self.tol.gauss_extrinsic, ["k"]))
    }

    fn gauss_intrinsic(&self) -> Result<CheckRecord> {
        let k = -self.theta.cos().powi(2);
        let h = self.grid.h;
        let s = self.sweep(|u, v| Ok(Some([gauss_curvature_intrinsic(|u, v| self.metric(u, v), u, v, h)? - k])))?;
        Ok(self.record(CheckId::GaussIntrinsic, s, self.tol.gauss_intrinsic, ["k"]))
    }

    fn principal_direction(&self) -> Result<CheckRecord> {
        let s = self.sweep(|u, v| Ok(principal_residual(&self.data(u, v)?).map(|r| [r])))?;
        let mut rec = self.record(CheckId::PrincipalDirection, s, self.tol.principal_direction, ["at"]);
        if rec.evaluated == 0 {
            rec.note = Some("skipped: T = 0 on the whole grid".into());
        }
        Ok(rec)
    }

    fn lambda(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.data(u, v)?.dominant_curvature())
    }

    fn codazzi(&self) -> Result<CheckRecord> {
        let (st, ct) = self.theta.sin_cos();
        let h = self.grid.h;
        let s = self.sweep(|u, v| {
            let fd = self.data(u, v)?;
            let lam = fd.dominant_curvature();
            let lam_u = d1(|x| self.lambda(x, v), u, h)?;
            let rhs =
                if fd.k1.abs() < FLAT_EPS && fd.k2.abs() < FLAT_EPS { st * ct } else { st * ct - lam * lam * ct / st };
            Ok(Some([lam_u - rhs]))
        })?;
        Ok(self.record(CheckId::Codazzi, s, self.tol.codazzi, ["lambda_u"]))
    }

    fn beta_pde(&self) -> Result<CheckRecord> {
        if self.is_slice() {
            return Ok(self.skipped(CheckId::BetaPde, self.tol.beta_pde, "cot(theta) is undefined for a slice"));
        }
        let cot = self.theta.cos() / self.theta.sin();
        let h = self.grid.h;
        let s = self.sweep(|u, v| {
            let lam = self.lambda(u, v)?;
            let beta = self.metric(u, v)?.2.sqrt();
            let beta_u = d1(|x| Ok(self.metric(x, v)?.2.sqrt()), u, h)?;
            Ok(Some([beta_u - beta * lam * cot]))
        })?;
        Ok(self.record(CheckId::BetaPde, s, self.tol.beta_pde, ["beta_u"]))
    }

    fn connection(&self) -> Result<CheckRecord> {
        if self.is_slice() {
            return Ok(self.skipped(CheckId::Connection, self.tol.connection, "cot(theta) is undefined for a slice"));
        }
        let cot = self.theta.cos() / self.theta.sin();
        let h = self.grid.h;
        let s = self.sweep(|u, v| {
            let gam = christoffel(|u, v| self.metric(u, v), u, v, h)?;
            let lam = self.lambda(u, v)?;
            let beta = self.metric(u, v)?.2.sqrt();
            let beta_v = d1(|y| Ok(self.metric(u, y)?.2.sqrt()), v, h)?;
            Ok(Some([
                gam[0][0][0],
                gam[1][0][0],
                gam[0][0][1],
                gam[1][0][1] - lam * cot,
                gam[0][1][1] + beta * beta * lam * cot,
                gam[1][1][1] - beta_v / beta,
            ]))
        })?;
        Ok(self.record(
            CheckId::Connection,
            s,
            self.tol.connection,
            ["gamma_u_uu", "gamma_v_uu", "gamma_u_uv", "gamma_v_uv", "gamma_u_vv", "gamma_v_vv"],
        ))
    }

    #[allow(clippy::needless_range_loop)]
    fn structure(&self) -> Result<CheckRecord> {
        let c = self.theta.cos();
        let h = self.grid.h;
        let s = self.sweep(|u, v| {
            let fd = self.data(u, v)?;
            let d = partials1(
                |u, v| {
                    let q = self.data(u, v)?;
                    Ok([q.cos_angle(), q.t[0], q.t[1]])
                },
                u,
                v,
                h,
            )?;
            let gam = christoffel(|u, v| self.metric(u, v), u, v, h)?;
            let col = |i: usize| [fd.a[0][i], fd.a[1][i]];
            let dir = |n: usize, i: usize| if i == 0 { d[n].0 } else { d[n].1 };
            let angle_u = dir(0, 0) + fd.metric_dot(col(0), fd.t);
            let angle_v = dir(0, 1) + fd.metric_dot(col(1), fd.t);
            let mut grad = 0.0f64;
            for k in 0..2 {
                for i in 0..2 {
                    let cov = dir(1 + k, i) + gam[k][i][0] * fd.t[0] + gam[k][i][1] * fd.t[1];
                    grad = grad.max((cov - c * fd.a[k][i]).abs());
                }
            }
            Ok(Some([angle_u, angle_v, grad]))
        })?;
        Ok(self.record(CheckId::Structure, s, self.tol.structure, ["angle_u", "angle_v", "nabla_t"]))
    }

    fn hyperboloid_shape(&self) -> Result<CheckRecord> {
        let c2 = self.theta.cos().powi(2);
        let s = self.sweep(|u, v| {
            let m = hyperboloid_shape(&self.subject.jet(u, v)?)?;
            Ok(Some([m[0][0] + c2, m[1][1] + 1.0, m[0][1], m[1][0]]))
        })?;
        Ok(self.record(CheckId::HyperboloidShape, s, self.tol.hyperboloid_shape, ["uu", "vv", "uv", "vu"]))
    }

    fn minimality(&self) -> Result<CheckRecord> {
        let surface = self.subject.surface();
        let kind = surface.kind();
        let curve = surface.curve();
        let stats = self.sweep(|u, v| {
            let fd = self.data(u, v)?;
            Ok(Some([fd.hm, fd.a_norm()]))
        })?;
        let [max_hm, max_a] = stats.components;
        let mut rec = match kind {
            SurfaceKind::SliceAtT0 { .. } => self.totally_geodesic(a_norm_sweep(self)?),
            SurfaceKind::Cylinder if curve.is_geodesic() => self.totally_geodesic(a_norm_sweep(self)?),
            SurfaceKind::Cylinder => {
                let s = self.sweep(|u, v| {
                    let fd = self.data(u, v)?;
                    Ok(Some([fd.hm - 0.5 * curve.curvature(v)?]))
                })?;
                let mut r = self.record(CheckId::Minimality, s, self.tol.mean_curvature, ["hm"]);
                r.note = Some("cylinder over a curved directrix: Hm = kappa/2".into());
                r
            }
            SurfaceKind::General => {
                let threshold = self.tol.nonminimal_threshold;
                let residual = (threshold - max_hm).max(0.0);
                let hm = self.sweep(|u, v| Ok(Some([self.data(u, v)?.hm])))?;
                CheckRecord {
                    name: CheckId::Minimality.name().into(),
                    max_residual: residual,
                    tolerance: 0.0,
                    pass: residual <= 0.0,
                    worst_point: hm.worst.map(|(u, v)| [u, v]),
                    evaluated: hm.evaluated,
                    metrics: BTreeMap::new(),
                    note: Some(format!("not minimal: residual = max(0, {threshold} - max|Hm|)")),
                }
            }
        };
        rec.metrics.insert("max_abs_hm".into(), max_hm);
        rec.metrics.insert("max_a_norm".into(), max_a);
        Ok(rec)
    }

    fn totally_geodesic(&self, s: Sweep<1>) -> CheckRecord {
        let mut r = self.record(CheckId::Minimality, s, self.tol.totally_geodesic, ["a_norm"]);
        r.note = Some("totally geodesic: residual = max |A|".into());
        r
    }
}

fn a_norm_sweep(ctx: &Ctx<'_>) -> Result<Sweep<1>> {
    ctx.sweep(|u, v| Ok(Some([ctx.data(u, v)?.a_norm()])))
}
