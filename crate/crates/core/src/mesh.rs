//! Triangle meshes of surfaces and their export to OBJ, PLY and CSV.
//!
//! Vertices are kept in H×R; a [`Chart`] maps them to ordinary 3-space on export.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::diffgeo::fundamental_data;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::surface::{AmbientPoint, ConstantAngleSurface, SurfaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// (x/(1+z), y/(1+z), t): Poincaré disk times R.
    Poincare,
    /// (x, y, t): drops the z coordinate of the hyperboloid.
    Drop,
}

impl Chart {
    pub fn apply(self, p: &AmbientPoint) -> [f64; 3] {
        match self {
            Chart::Poincare => to_poincare(p),
            Chart::Drop => [p.h.x, p.h.y, p.t],
        }
    }
}

impl std::str::FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poincare" => Ok(Chart::Poincare),
            "drop" => Ok(Chart::Drop),
            _ => Err(Error::Parse(format!("unknown chart {s:?} (expected poincare or drop)"))),
        }
    }
}

/// Hyperboloid to Poincaré disk, keeping the height.
pub fn to_poincare(p: &AmbientPoint) -> [f64; 3] {
    let d = 1.0 + p.h.z;
    [p.h.x / d, p.h.y / d, p.t]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<AmbientPoint>,
    /// Parameters (u, v) of each vertex.
    pub params: Vec<[f64; 2]>,
    pub faces: Vec<[usize; 3]>,
    /// Gauss curvature det A − 1 + ‖T‖² per vertex.
    pub curvature: Vec<f64>,
    /// |⟨ξ, ∂t⟩ − cosθ| per vertex.
    pub angle_residual: Vec<f64>,
    pub nu: usize,
    pub nv: usize,
    /// Whether the last v-column was merged into the first.
    pub welded: bool,
}

/// Period of the v-parameter for closed directrices (and the polar angle of a slice).
fn seam_period(s: &ConstantAngleSurface) -> Option<f64> {
    match s.kind() {
        SurfaceKind::SliceAtT0 { .. } => Some(TAU),
        _ => s.curve().period(),
    }
}

/// Point, (u, v), K and angle residual.
type VertexRow = (AmbientPoint, [f64; 2], f64, f64);

pub fn tessellate(s: &ConstantAngleSurface, nu: usize, nv: usize) -> Result<Mesh> {
    tessellate_with(s, nu, nv, Execution::default())
}

/// Uniform nu×nv parameter grid with two triangles per cell. When v spans
/// exactly one period of a closed directrix (and nv ≥ 3) the seam is welded,
/// leaving nv − 1 distinct columns.
pub fn tessellate_with(s: &ConstantAngleSurface, nu: usize, nv: usize, exec: Execution) -> Result<Mesh> {
    if nu < 2 || nv < 2 {
        return Err(Error::InvalidArgument(format!("mesh needs nu, nv >= 2, got {nu}x{nv}")));
    }
    let (u0, u1) = s.u_range();
    let (v0, v1) = s.v_range();
    let welded = nv >= 3 && seam_period(s).is_some_and(|p| ((v1 - v0) - p).abs() <= 1e-9 * p.max(1.0));
    let cols = if welded { nv - 1 } else { nv };
    let cos_theta = s.theta().cos();
    let rows = exec.map_range(nu, |i| -> Result<Vec<VertexRow>> {
        let u = u0 + (u1 - u0) * i as f64 / (nu - 1) as f64;
        (0..cols)
            .map(|j| {
                let v = v0 + (v1 - v0) * j as f64 / (nv - 1) as f64;
                let fd = fundamental_data(&s.immerse_jet(u, v)?)?;
                Ok((s.immerse(u, v)?, [u, v], fd.k, (fd.cos_angle() - cos_theta).abs()))
            })
            .collect()
    });
    let mut mesh = Mesh {
        vertices: Vec::with_capacity(nu * cols),
        params: Vec::with_capacity(nu * cols),
        faces: Vec::with_capacity(2 * (nu - 1) * (nv - 1)),
        curvature: Vec::with_capacity(nu * cols),
        angle_residual: Vec::with_capacity(nu * cols),
        nu,
        nv,
        welded,
    };
    for row in rows {
        for (p, uv, k, a) in row? {
            mesh.vertices.push(p);
            mesh.params.push(uv);
            mesh.curvature.push(k);
            mesh.angle_residual.push(a);
        }
    }
    let idx = |i: usize, j: usize| i * cols + if j == cols { 0 } else { j };
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            mesh.faces.push([a, b, c]);
            mesh.faces.push([a, c, d]);
        }
    }
    Ok(mesh)
}

impl Mesh {
    pub fn chart_vertices(&self, chart: Chart) -> Vec<[f64; 3]> {
        self.vertices.iter().map(|p| chart.apply(p)).collect()
    }

    /// Smallest triangle area in chart coordinates.
    pub fn min_face_area(&self, chart: Chart) -> f64 {
        let vs = self.chart_vertices(chart);
        self.faces
            .iter()
            .map(|f| norm(cross(sub(vs[f[1]], vs[f[0]]), sub(vs[f[2]], vs[f[0]]))) / 2.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Unnormalized face normals in chart coordinates.
    pub fn face_normals(&self, chart: Chart) -> Vec<[f64; 3]> {
        let vs = self.chart_vertices(chart);
        self.faces.iter().map(|f| cross(sub(vs[f[1]], vs[f[0]]), sub(vs[f[2]], vs[f[0]]))).collect()
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// C's `%.9g`.
pub fn fmt_g9(x: f64) -> String {
    const P: i32 = 9;
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_obj<W: Write>(mesh: &Mesh, chart: Chart, mut w: W) -> Result<()> {
    for p in mesh.chart_vertices(chart) {
        writeln!(w, "v {} {} {}", fmt_g9(p[0]), fmt_g9(p[1]), fmt_g9(p[2]))?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

/// ASCII PLY with the per-vertex curvature and angle residual as extra properties.
pub fn write_ply<W: Write>(mesh: &Mesh, chart: Chart, mut w: W) -> Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", mesh.vertices.len())?;
    for name in ["x", "y", "z", "gauss_curvature", "angle_residual"] {
        writeln!(w, "property double {name}")?;
    }
    writeln!(w, "element face {}", mesh.faces.len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for ((p, k), a) in mesh.chart_vertices(chart).iter().zip(&mesh.curvature).zip(&mesh.angle_residual) {
        writeln!(w, "{} {} {} {} {}", fmt_g9(p[0]), fmt_g9(p[1]), fmt_g9(p[2]), fmt_g9(*k), fmt_g9(*a))?;
    }
    for f in &mesh.faces {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

/// `u,v,K,angle_residual` per vertex.
pub fn write_csv<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "u,v,K,angle_residual")?;
    for ((uv, k), a) in mesh.params.iter().zip(&mesh.curvature).zip(&mesh.angle_residual) {
        writeln!(w, "{},{},{},{}", uv[0], uv[1], k, a)?;
    }
    Ok(())
}

/// Vertices and triangles of an OBJ file (1-based indices, optional `/vt/vn` suffixes).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjData {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

pub fn read_obj<R: BufRead>(r: R) -> Result<ObjData> {
    let mut out = ObjData::default();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
        match it.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for x in p.iter_mut() {
                    *x = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad vertex"))?;
                }
                out.vertices.push(p);
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|t| t.split('/').next().and_then(|i| i.parse::<usize>().ok()).filter(|&i| i >= 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad("bad face index"))?;
                if idx.len() != 3 {
                    return Err(bad("only triangles are supported"));
                }
                out.faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    if let Some(f) = out.faces.iter().flatten().find(|&&i| i >= out.vertices.len()) {
        return Err(Error::Parse(format!("face index {} out of range", f + 1)));
    }
    Ok(out)
}
