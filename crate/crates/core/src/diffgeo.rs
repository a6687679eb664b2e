//! Extrinsic and intrinsic geometry of a surface immersed in H²×R.
//!
//! Ambient vectors carry the product metric dx² + dy² − dz² + dt². Coordinate
//! matrices act on component columns in the (F_u, F_v) basis: `a[k][i]` is the
//! k-th component of A(∂_i).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::lorentz_cross;
use crate::stencil::partials2;
use crate::surface::{AmbientPoint, AmbientVec};

/// Gram determinants below this are treated as a degenerate tangent plane.
pub const GRAM_FLOOR: f64 = 1e-10;
/// Principal directions are undefined when |k1 − k2| falls below this.
pub const UMBILIC_EPS: f64 = 1e-10;

pub type Mat2 = [[f64; 2]; 2];

/// Position and partial derivatives up to second order at one parameter point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    pub f: AmbientPoint,
    pub fu: AmbientVec,
    pub fv: AmbientVec,
    pub fuu: AmbientVec,
    pub fuv: AmbientVec,
    pub fvv: AmbientVec,
}

impl SurfaceJet {
    /// Largest componentwise difference of the first and of the second derivatives.
    pub fn distance(&self, o: &SurfaceJet) -> (f64, f64) {
        let d1 = (self.fu - o.fu).max_abs().max((self.fv - o.fv).max_abs());
        let d2 = (self.fuu - o.fuu).max_abs().max((self.fuv - o.fuv).max_abs()).max((self.fvv - o.fvv).max_abs());
        (d1, d2)
    }
}

/// Central 4th-order finite-difference jet of `immersion` at (u, v).
pub fn jet_fd<I>(immersion: I, u: f64, v: f64, h: f64) -> Result<SurfaceJet>
where
    I: Fn(f64, f64) -> Result<AmbientPoint>,
{
    let p = partials2(|u, v| immersion(u, v).map(AmbientVec::to_array), u, v, h)?;
    let pick = |get: fn(&crate::stencil::Partials) -> f64| {
        AmbientVec::from_array([get(&p[0]), get(&p[1]), get(&p[2]), get(&p[3])])
    };
    Ok(SurfaceJet {
        f: pick(|q| q.value),
        fu: pick(|q| q.du),
        fv: pick(|q| q.dv),
        fuu: pick(|q| q.duu),
        fuv: pick(|q| q.duv),
        fvv: pick(|q| q.dvv),
    })
}

/// (E, F, G). Fails unless the induced metric is positive definite.
pub fn first_fundamental(j: &SurfaceJet) -> Result<(f64, f64, f64)> {
    let e = j.fu.dot(j.fu);
    let f = j.fu.dot(j.fv);
    let g = j.fv.dot(j.fv);
    let gram = e * g - f * f;
    if !(e > 0.0 && g > 0.0 && gram > GRAM_FLOOR) {
        return Err(Error::DegenerateTangentPlane { gram });
    }
    Ok((e, f, g))
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Unit normal of the surface inside H×R, oriented so that ⟨ξ, ∂t⟩ ≥ 0.
///
/// When ⟨ξ, ∂t⟩ vanishes the h-part is oriented along p ⊠ (F_v)_h, which for a
/// vertical cylinder is f ⊠ f'.
pub fn unit_normal(j: &SurfaceJet) -> Result<AmbientVec> {
    first_fundamental(j)?;
    let rows = [j.fu.to_array(), j.fv.to_array(), j.f.horizontal().to_array()];
    // cofactor vector: n·x = det[rows; x], Euclidean-orthogonal to every row
    let col = |skip: usize| -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (r, row) in rows.iter().enumerate() {
            let mut c = 0;
            for (k, x) in row.iter().enumerate() {
                if k != skip {
                    m[r][c] = *x;
                    c += 1;
                }
            }
        }
        m
    };
    let mut n = [0.0; 4];
    for (k, nk) in n.iter_mut().enumerate() {
        let m = col(k);
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        *nk = sign * det3(m[0], m[1], m[2]);
    }
    // raise the index with diag(1, 1, −1, 1)
    n[2] = -n[2];
    let xi = AmbientVec::from_array(n);
    let norm_sq = xi.dot(xi);
    if !(norm_sq > 0.0) || !norm_sq.is_finite() {
        return Err(Error::DegenerateTangentPlane { gram: norm_sq });
    }
    let mut xi = xi * norm_sq.sqrt().recip();
    let flip = if xi.t.abs() > 1e-10 {
        xi.t < 0.0
    } else {
        let reference = lorentz_cross(j.f.h, j.fv.h);
        crate::minkowski::lorentz_dot(xi.h, reference) < 0.0
    };
    if flip {
        xi = -xi;
    }
    Ok(xi)
}

/// First and second fundamental forms, shape operator and derived curvatures at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalData {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub xi: AmbientVec,
    pub xi_tilde: AmbientVec,
    /// Components of T = ∂t − ⟨∂t, ξ⟩ξ in the (F_u, F_v) basis.
    pub t: [f64; 2],
    pub a: Mat2,
    pub k1: f64,
    pub k2: f64,
    /// det A − 1 + ‖T‖².
    pub k: f64,
    pub hm: f64,
}

impl FundamentalData {
    pub fn cos_angle(&self) -> f64 {
        self.xi.t
    }

    /// g(T, T).
    pub fn t_norm_sq(&self) -> f64 {
        self.metric_dot(self.t, self.t)
    }

    pub fn metric_dot(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        self.e * x[0] * y[0] + self.f * (x[0] * y[1] + x[1] * y[0]) + self.g * x[1] * y[1]
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        mat_vec(self.a, x)
    }

    /// The principal curvature of larger modulus.
    pub fn dominant_curvature(&self) -> f64 {
        if self.k1.abs() >= self.k2.abs() {
            self.k1
        } else {
            self.k2
        }
    }

    /// Frobenius norm of A measured with the induced metric, √tr(A²) for self-adjoint A.
    pub fn a_norm(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2).sqrt()
    }

    /// Unit eigenvectors of A (for k1, k2), or `None` near umbilic points.
    pub fn principal_directions(&self) -> Option<[[f64; 2]; 2]> {
        if (self.k1 - self.k2).abs() < UMBILIC_EPS {
            return None;
        }
        let [[a, b], [c, d]] = self.a;
        let dir = |k: f64| {
            let p = [b, k - a];
            let q = [k - d, c];
            let v = if p[0].hypot(p[1]) >= q[0].hypot(q[1]) { p } else { q };
            let len = self.metric_dot(v, v).sqrt();
            [v[0] / len, v[1] / len]
        };
        Some([dir(self.k1), dir(self.k2)])
    }
}

pub fn mat_vec(a: Mat2, x: [f64; 2]) -> [f64; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// Eigenvalues (ascending) of a 2×2 matrix with real spectrum.
pub fn eigenvalues(a: Mat2) -> (f64, f64) {
    let half_tr = 0.5 * (a[0][0] + a[1][1]);
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let half_gap = 0.5 * (a[0][0] - a[1][1]);
    let disc = (half_gap * half_gap + a[0][1] * a[1][0]).max(0.0).sqrt();
    let big = if half_tr >= 0.0 { half_tr + disc } else { half_tr - disc };
    let small = if big != 0.0 { det / big } else { 0.0 };
    if big <= small {
        (big, small)
    } else {
        (small, big)
    }
}

/// Solves g·x = rhs for the metric with entries (E, F, G).
fn solve_metric(e: f64, f: f64, g: f64, rhs: [f64; 2]) -> [f64; 2] {
    let det = e * g - f * f;
    [(g * rhs[0] - f * rhs[1]) / det, (e * rhs[1] - f * rhs[0]) / det]
}

/// Fundamental forms and shape operator with respect to the normal `xi`.
pub fn shape_operator(j: &SurfaceJet, xi: AmbientVec) -> Result<FundamentalData> {
    let (e, f, g) = first_fundamental(j)?;
    let l = j.fuu.dot(xi);
    let m = j.fuv.dot(xi);
    let n = j.fvv.dot(xi);
    let col_u = solve_metric(e, f, g, [l, m]);
    let col_v = solve_metric(e, f, g, [m, n]);
    let a = [[col_u[0], col_v[0]], [col_u[1], col_v[1]]];
    let (k1, k2) = eigenvalues(a);
    let t = solve_metric(e, f, g, [j.fu.t, j.fv.t]);
    let mut fd = FundamentalData {
        e,
        f,
        g,
        l,
        m,
        n,
        xi,
        xi_tilde: j.f.horizontal(),
        t,
        a,
        k1,
        k2,
        k: 0.0,
        hm: 0.5 * (a[0][0] + a[1][1]),
    };
    fd.k = gauss_curvature_extrinsic(&fd);
    Ok(fd)
}

/// [`unit_normal`] followed by [`shape_operator`].
pub fn fundamental_data(j: &SurfaceJet) -> Result<FundamentalData> {
    shape_operator(j, unit_normal(j)?)
}

/// Gauss equation contracted on an orthonormal frame: K = det A − 1 + ‖T‖².
pub fn gauss_curvature_extrinsic(fd: &FundamentalData) -> f64 {
    let det = fd.a[0][0] * fd.a[1][1] - fd.a[0][1] * fd.a[1][0];
    det - 1.0 + fd.t_norm_sq()
}

/// Intrinsic Gaussian curvature from finite differences of the metric.
///
/// Orthogonal charts (|F| < 1e−8) use the orthogonal-coordinates formula,
/// others the Brioschi formula.
pub fn gauss_curvature_intrinsic<M>(metric: M, u: f64, v: f64, h: f64) -> Result<f64>
where
    M: Fn(f64, f64) -> Result<(f64, f64, f64)>,
{
    let [e, f, g] = partials2(|u, v| metric(u, v).map(|(e, f, g)| [e, f, g]), u, v, h)?;
    let (ev, fv, gv) = (e.value, f.value, g.value);
    let w = ev * gv - fv * fv;
    if !(w > 0.0) {
        return Err(Error::DegenerateTangentPlane { gram: w });
    }
    if fv.abs() < 1e-8 {
        let eg = ev * gv;
        let bracket = e.dvv + g.duu - (g.du * (e.du * gv + ev * g.du) + e.dv * (e.dv * gv + ev * g.dv)) / (2.0 * eg);
        return Ok(-bracket / (2.0 * eg));
    }
    let m1 = [
        [-0.5 * e.dvv + f.duv - 0.5 * g.duu, 0.5 * e.du, f.du - 0.5 * e.dv],
        [f.dv - 0.5 * g.du, ev, fv],
        [0.5 * g.dv, fv, gv],
    ];
    let m2 = [[0.0, 0.5 * e.dv, 0.5 * g.du], [0.5 * e.dv, ev, fv], [0.5 * g.du, fv, gv]];
    Ok((det3(m1[0], m1[1], m1[2]) - det3(m2[0], m2[1], m2[2])) / (w * w))
}

/// Shape operator of H×R ⊂ R³₁×R along the surface: the matrix of
/// X ↦ −(tangential part of (X₁, X₂, X₃, 0)) in the (F_u, F_v) basis.
pub fn hyperboloid_shape(j: &SurfaceJet) -> Result<Mat2> {
    let (e, f, g) = first_fundamental(j)?;
    let column = |x: AmbientVec| {
        let w = x.horizontal();
        let c = solve_metric(e, f, g, [w.dot(j.fu), w.dot(j.fv)]);
        [-c[0], -c[1]]
    };
    let cu = column(j.fu);
    let cv = column(j.fv);
    Ok([[cu[0], cv[0]], [cu[1], cv[1]]])
}

/// Christoffel symbols `gamma[k][i][j]` = Γ^k_ij (indices 0 = u, 1 = v) from finite differences of the metric.
pub fn christoffel<M>(metric: M, u: f64, v: f64, h: f64) -> Result<[Mat2; 2]>
where
    M: Fn(f64, f64) -> Result<(f64, f64, f64)>,
{
    let d = crate::stencil::partials1(|u, v| metric(u, v).map(|(e, f, g)| [e, f, g]), u, v, h)?;
    let (e, f, g) = metric(u, v)?;
    // dg[c][a][b] = ∂_c g_ab
    let dg = |c: usize| -> Mat2 {
        let pick = |n: usize| if c == 0 { d[n].0 } else { d[n].1 };
        [[pick(0), pick(1)], [pick(1), pick(2)]]
    };
    let dgs = [dg(0), dg(1)];
    let mut lower = [[[0.0; 2]; 2]; 2]; // Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    for l in 0..2 {
        for i in 0..2 {
            for jj in 0..2 {
                lower[l][i][jj] = 0.5 * (dgs[i][jj][l] + dgs[jj][i][l] - dgs[l][i][jj]);
            }
        }
    }
    let mut out = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for jj in 0..2 {
            let up = solve_metric(e, f, g, [lower[0][i][jj], lower[1][i][jj]]);
            out[0][i][jj] = up[0];
            out[1][i][jj] = up[1];
        }
    }
    Ok(out)
}
