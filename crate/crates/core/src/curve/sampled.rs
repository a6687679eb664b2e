//! Curves given by samples on the hyperboloid.
//!
//! Input samples are taken at an arbitrary regular parameter. They are
//! resampled at uniform arclength: node derivatives come from 4th-order
//! finite differences (periodic for closed curves, one-sided windows at the
//! ends of open ones), the curve between nodes is a quintic Hermite
//! interpolant, arclength is integrated along that interpolant with
//! Gauss–Legendre quadrature and inverted per segment with safeguarded Newton.

use std::path::Path;

use crate::curve::{geodesic_curvature, CurveJet};
use crate::error::{Error, Result};
use crate::minkowski::{lorentz_cross, lorentz_dot, on_hyperboloid, project_to_hyperboloid, LVec3};
use crate::stencil::{fornberg_weights, CENTRAL_D1, CENTRAL_D2, CENTRAL_OFFSETS};

pub const MIN_SAMPLES: usize = 8;

const LOAD_TOL: f64 = 1e-6;

const GL_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] =
    [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];

/// A unit-speed curve stored as nodes at uniform arclength spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    raw: Vec<LVec3>,
    closed: bool,
    nodes: Vec<LVec3>,
    d1: Vec<LVec3>,
    d2: Vec<LVec3>,
    spacing: f64,
    length: f64,
}

impl SampledCurve {
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Samples as originally supplied, before resampling.
    pub fn raw_points(&self) -> &[LVec3] {
        &self.raw
    }

    /// Resampled nodes; node `k` sits at arclength `k * spacing`.
    pub fn nodes(&self) -> &[LVec3] {
        &self.nodes
    }

    /// Largest |‖f'‖ − 1| of the finite-difference tangents at the nodes.
    pub fn max_speed_defect(&self) -> f64 {
        self.d1.iter().map(|d| (lorentz_dot(*d, *d).max(0.0).sqrt() - 1.0).abs()).fold(0.0, f64::max)
    }

    fn locate(&self, v: f64) -> Result<(usize, f64)> {
        let n = self.nodes.len();
        let (v, segments) = if self.closed {
            (v.rem_euclid(self.length), n)
        } else {
            let slack = 1e-9 * self.length;
            if !(v >= -slack && v <= self.length + slack) {
                return Err(Error::OutOfRange { value: v, lo: 0.0, hi: self.length });
            }
            (v.clamp(0.0, self.length), n - 1)
        };
        let k = ((v / self.spacing).floor() as usize).min(segments - 1);
        Ok((k, v / self.spacing - k as f64))
    }

    fn raw_jet(&self, v: f64) -> Result<(LVec3, LVec3, LVec3)> {
        let (k, t) = self.locate(v)?;
        let k1 = (k + 1) % self.nodes.len();
        let h = self.spacing;
        let seg = Segment {
            p0: self.nodes[k],
            m0: self.d1[k] * h,
            a0: self.d2[k] * (h * h),
            p1: self.nodes[k1],
            m1: self.d1[k1] * h,
            a1: self.d2[k1] * (h * h),
        };
        let (p, dp, ddp) = seg.eval(t);
        Ok((p, dp / h, ddp / (h * h)))
    }

    /// Jet at arclength `v`, re-projected so the jet invariants hold exactly:
    /// the position is pushed onto H, the tangent made orthogonal and unit, and
    /// the second derivative rebuilt in Frenet form from the interpolated κ.
    pub fn eval(&self, v: f64) -> Result<CurveJet> {
        let (p, dp, ddp) = self.raw_jet(v)?;
        let f = project_to_hyperboloid(p)?.vec();
        let t = dp + f * lorentz_dot(f, dp);
        let speed = lorentz_dot(t, t);
        if !(speed > 0.0) {
            return Err(Error::DegenerateCurve { index: self.locate(v)?.0 });
        }
        let df = t / speed.sqrt();
        let g = lorentz_cross(f, df);
        let kappa = lorentz_dot(ddp, g);
        Ok(CurveJet { f, df, ddf: f + g * kappa })
    }

    /// dκ/dv by a 5-point stencil on the interpolated curvature.
    pub fn curvature_rate(&self, v: f64) -> Result<f64> {
        let h = 0.25 * self.spacing;
        let kappa = |s: f64| -> Result<f64> { Ok(geodesic_curvature(&self.eval(s)?)) };
        if self.closed {
            return crate::stencil::d1(kappa, v, h);
        }
        // shift the stencil inward near the ends
        let lo = v - 2.0 * h;
        let hi = v + 2.0 * h;
        let offsets: Vec<f64> = if lo < 0.0 {
            (0..5).map(|i| i as f64 * h - v.max(0.0)).collect()
        } else if hi > self.length {
            (0..5).map(|i| self.length - v.min(self.length) - (4 - i) as f64 * h).collect()
        } else {
            CENTRAL_OFFSETS.iter().map(|o| o * h).collect()
        };
        let w = fornberg_weights(0.0, &offsets, 1);
        let mut acc = 0.0;
        for (o, c) in offsets.iter().zip(&w[1]) {
            acc += c * kappa(v + o)?;
        }
        Ok(acc)
    }

    pub fn curvature_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let count = if self.closed { self.len() } else { self.len() - 1 };
        for k in 0..=count.max(1) * 2 {
            let v = (k as f64 * 0.5 * self.spacing).min(self.length);
            if let Ok(j) = self.eval(v) {
                let kappa = geodesic_curvature(&j);
                lo = lo.min(kappa);
                hi = hi.max(kappa);
            }
        }
        (lo, hi)
    }

    pub fn max_abs_curvature(&self) -> f64 {
        let (lo, hi) = self.curvature_bounds();
        lo.abs().max(hi.abs())
    }
}

/// Quintic Hermite segment on t ∈ [0, 1] with derivative data pre-scaled by the step.
struct Segment {
    p0: LVec3,
    m0: LVec3,
    a0: LVec3,
    p1: LVec3,
    m1: LVec3,
    a1: LVec3,
}

// Power-basis coefficients (t⁰..t⁵) of the six quintic Hermite basis functions.
const HERMITE5: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
];

impl Segment {
    fn eval(&self, t: f64) -> (LVec3, LVec3, LVec3) {
        let data = [self.p0, self.m0, self.a0, self.p1, self.m1, self.a1];
        let mut out = [LVec3::ZERO; 3];
        for (coef, d) in HERMITE5.iter().zip(data) {
            let (b, db, ddb) = poly5(coef, t);
            out[0] += d * b;
            out[1] += d * db;
            out[2] += d * ddb;
        }
        (out[0], out[1], out[2])
    }

    fn speed(&self, t: f64) -> f64 {
        let (p, dp, _) = self.eval(t);
        let n = -lorentz_dot(p, p);
        let tangential = dp + p * (lorentz_dot(p, dp) / n);
        (lorentz_dot(tangential, tangential).max(0.0) / n).sqrt()
    }

    fn arclength(&self, t: f64) -> f64 {
        let half = 0.5 * t;
        GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * self.speed(half * (x + 1.0))).sum::<f64>() * half
    }

    /// Parameter `t` at which the arclength from the segment start equals `target`.
    fn invert(&self, target: f64, total: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = (target / total).clamp(0.0, 1.0);
        for _ in 0..60 {
            let r = self.arclength(t) - target;
            if r.abs() <= 1e-15 * total.max(1.0) {
                break;
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let step = r / self.speed(t);
            let next = t - step;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-16 {
                break;
            }
        }
        t
    }
}

fn poly5(c: &[f64; 6], t: f64) -> (f64, f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    let mut dd = 0.0;
    for k in (0..6).rev() {
        dd = dd * t + d * 2.0;
        d = d * t + v;
        v = v * t + c[k];
    }
    (v, d, dd)
}

/// First and second derivatives at every node of a uniformly spaced sequence.
fn node_derivatives(points: &[LVec3], closed: bool, step: f64) -> (Vec<LVec3>, Vec<LVec3>) {
    let n = points.len();
    let mut d1 = vec![LVec3::ZERO; n];
    let mut d2 = vec![LVec3::ZERO; n];
    for i in 0..n {
        if closed || (i >= 2 && i + 2 < n) {
            for (k, off) in CENTRAL_OFFSETS.iter().enumerate() {
                let j = (i as isize + *off as isize).rem_euclid(n as isize) as usize;
                d1[i] += points[j] * CENTRAL_D1[k];
                d2[i] += points[j] * CENTRAL_D2[k];
            }
        } else {
            let start = if i < 2 { 0 } else { n - 6 };
            let xs: Vec<f64> = (start..start + 6).map(|j| j as f64 - i as f64).collect();
            let w = fornberg_weights(0.0, &xs, 2);
            for (m, j) in (start..start + 6).enumerate() {
                d1[i] += points[j] * w[1][m];
                d2[i] += points[j] * w[2][m];
            }
        }
        d1[i] = d1[i] / step;
        d2[i] = d2[i] / (step * step);
    }
    (d1, d2)
}

fn segments(points: &[LVec3], d1: &[LVec3], d2: &[LVec3], closed: bool, step: f64) -> Vec<Segment> {
    let n = points.len();
    let count = if closed { n } else { n - 1 };
    (0..count)
        .map(|k| {
            let k1 = (k + 1) % n;
            Segment {
                p0: points[k],
                m0: d1[k] * step,
                a0: d2[k] * (step * step),
                p1: points[k1],
                m1: d1[k1] * step,
                a1: d2[k1] * (step * step),
            }
        })
        .collect()
}

/// Resamples a regularly parametrized curve on H at uniform arclength.
///
/// The result has as many nodes as the input. Closed curves must not repeat
/// their first sample at the end.
pub fn reparametrize_unit_speed(points: &[LVec3], closed: bool) -> Result<SampledCurve> {
    let n = points.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_SAMPLES, got: n });
    }
    for p in points {
        if !on_hyperboloid(*p, LOAD_TOL) {
            return Err(Error::NotOnHyperboloid { point: p.to_array(), defect: p.norm_sq() + 1.0 });
        }
    }
    let pairs = if closed { n } else { n - 1 };
    for i in 0..pairs {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if (a - b).max_abs() <= 1e-14 * a.max_abs() {
            return Err(Error::DegenerateCurve { index: i });
        }
    }

    let (rd1, rd2) = node_derivatives(points, closed, 1.0);
    let raw_segments = segments(points, &rd1, &rd2, closed, 1.0);

    let mut cumulative = Vec::with_capacity(raw_segments.len() + 1);
    cumulative.push(0.0);
    for (i, seg) in raw_segments.iter().enumerate() {
        let len = seg.arclength(1.0);
        if !(len > 0.0) || GL_NODES.iter().any(|x| !(seg.speed(0.5 * (x + 1.0)) > 0.0)) {
            return Err(Error::DegenerateCurve { index: i });
        }
        cumulative.push(cumulative[i] + len);
    }
    let length = *cumulative.last().unwrap();
    let spacing = if closed { length / n as f64 } else { length / (n - 1) as f64 };

    let mut nodes = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let s = k as f64 * spacing;
        while seg + 1 < raw_segments.len() && cumulative[seg + 1] <= s {
            seg += 1;
        }
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let t = raw_segments[seg].invert(s - cumulative[seg], seg_len);
        let (p, _, _) = raw_segments[seg].eval(t);
        nodes.push(project_to_hyperboloid(p)?.vec());
    }
    if !closed {
        nodes[n - 1] = project_to_hyperboloid(points[n - 1])?.vec();
    }

    let (d1, d2) = node_derivatives(&nodes, closed, spacing);
    Ok(SampledCurve { raw: points.to_vec(), closed, nodes, d1, d2, spacing, length })
}

/// Parses samples from JSON (`[[x,y,z],...]` or `{"points": [...], "closed": bool}`)
/// or plain text (one `x y z` triple per line, `#` comments, a `# closed` line
/// marks a closed curve). Points are checked against the hyperboloid and
/// projected onto it.
pub fn parse_points(text: &str) -> Result<(Vec<LVec3>, bool)> {
    let trimmed = text.trim_start();
    let (raw, closed) = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Input {
            List(Vec<[f64; 3]>),
            Object {
                points: Vec<[f64; 3]>,
                #[serde(default)]
                closed: bool,
            },
        }
        match serde_json::from_str::<Input>(trimmed)? {
            Input::List(p) => (p, false),
            Input::Object { points, closed } => (points, closed),
        }
    } else {
        let mut pts = Vec::new();
        let mut closed = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if comment.trim().eq_ignore_ascii_case("closed") {
                    closed = true;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::parse::<f64>)
                .collect();
            match vals {
                Ok(v) if v.len() == 3 => pts.push([v[0], v[1], v[2]]),
                _ => return Err(Error::Parse(format!("line {}: expected three numbers", lineno + 1))),
            }
        }
        (pts, closed)
    };
    let mut out = Vec::with_capacity(raw.len());
    for p in raw {
        let v = LVec3::from_array(p);
        if !on_hyperboloid(v, LOAD_TOL) {
            return Err(Error::NotOnHyperboloid { point: p, defect: v.norm_sq() + 1.0 });
        }
        out.push(project_to_hyperboloid(v)?.vec());
    }
    Ok((out, closed))
}

pub fn load_points(path: impl AsRef<Path>) -> Result<(Vec<LVec3>, bool)> {
    parse_points(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::HCurve;

    fn geodesic_points(n: usize, speed: f64, t0: f64, dt: f64) -> Vec<LVec3> {
        (0..n)
            .map(|i| {
                let s = speed * (t0 + i as f64 * dt);
                LVec3::new(s.sinh(), 0.0, s.cosh())
            })
            .collect()
    }

    fn wobbly_circle(n: usize) -> Vec<LVec3> {
        (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                let r = 0.8 + 0.3 * t.sin();
                LVec3::new(r.sinh() * t.cos(), r.sinh() * t.sin(), r.cosh())
            })
            .collect()
    }

    #[test]
    fn unit_speed_input_is_a_fixed_point() {
        let pts = geodesic_points(41, 1.0, -1.0, 0.05);
        let c = reparametrize_unit_speed(&pts, false).unwrap();
        assert!((c.length() - 2.0).abs() < 1e-9);
        for (a, b) in c.nodes().iter().zip(&pts) {
            assert!((*a - *b).max_abs() < 1e-8);
        }
    }

    #[test]
    fn double_speed_geodesic_becomes_unit_speed() {
        let pts = geodesic_points(60, 2.0, -0.5, 1.0 / 59.0);
        let c = reparametrize_unit_speed(&pts, false).unwrap();
        assert!((c.length() - 2.0).abs() < 1e-8);
        assert!(c.max_speed_defect() < 1e-6);
        for i in 0..=40 {
            let v = c.length() * i as f64 / 40.0;
            let got = c.eval(v).unwrap();
            let want = HCurve::Geodesic.eval(v - 1.0).unwrap();
            assert!((got.f - want.f).max_abs() < 1e-7, "f at {v}");
            assert!((got.df - want.df).max_abs() < 1e-6, "df at {v}");
            assert!(geodesic_curvature(&got).abs() < 1e-5);
        }
    }

    #[test]
    fn sampled_circle_matches_analytic() {
        let rho: f64 = 1.0;
        let n = 128;
        let pts: Vec<LVec3> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                LVec3::new(rho.sinh() * t.cos(), rho.sinh() * t.sin(), rho.cosh())
            })
            .collect();
        let c = reparametrize_unit_speed(&pts, true).unwrap();
        assert!((c.length() - std::f64::consts::TAU * rho.sinh()).abs() < 1e-9);
        let analytic = HCurve::circle(rho).unwrap();
        for i in 0..97 {
            let v = c.length() * i as f64 / 97.0;
            let a = c.eval(v).unwrap();
            let b = analytic.eval(v).unwrap();
            assert!((a.f - b.f).max_abs() < 1e-8);
            assert!((geodesic_curvature(&a) - 1.0 / rho.tanh()).abs() < 1e-6);
            let rate = c.curvature_rate(v).unwrap().abs();
            assert!(rate < 1e-4, "rate {rate}");
        }
    }

    #[test]
    fn wobbly_curve_jets_are_consistent() {
        let c = reparametrize_unit_speed(&wobbly_circle(256), true).unwrap();
        assert!(c.max_speed_defect() < 1e-6);
        for i in 0..50 {
            let v = c.length() * (i as f64 + 0.37) / 50.0;
            let j = c.eval(v).unwrap();
            assert!(j.invariant_defect() < 1e-12);
            assert!(j.frenet_defect() < 1e-12);
        }
        let (lo, hi) = c.curvature_bounds();
        assert!(lo > 1.0 && hi < 2.0, "{lo} {hi}");
    }

    #[test]
    fn open_curve_rejects_out_of_range() {
        let c = reparametrize_unit_speed(&geodesic_points(20, 1.0, 0.0, 0.1), false).unwrap();
        assert!(c.eval(-0.1).is_err());
        assert!(c.eval(c.length() + 0.1).is_err());
        assert!(c.eval(c.length()).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let pts = geodesic_points(3, 1.0, 0.0, 0.1);
        assert!(matches!(reparametrize_unit_speed(&pts, false), Err(Error::TooFewSamples { .. })));
        let mut pts = geodesic_points(10, 1.0, 0.0, 0.1);
        pts[4] = pts[3];
        assert!(matches!(reparametrize_unit_speed(&pts, false), Err(Error::DegenerateCurve { .. })));
        let mut pts = geodesic_points(10, 1.0, 0.0, 0.1);
        pts[2].z += 0.1;
        assert!(reparametrize_unit_speed(&pts, false).is_err());
    }

    #[test]
    fn parse_formats() {
        let json = r#"{"points": [[0,0,1],[0.5210953054937474,0,1.1276259652063807]], "closed": true}"#;
        let (p, closed) = parse_points(json).unwrap();
        assert_eq!(p.len(), 2);
        assert!(closed);
        let (p, closed) = parse_points("[[0,0,1]]").unwrap();
        assert_eq!(p.len(), 1);
        assert!(!closed);
        let text = "# closed\n0 0 1\n0.5210953054937474, 0, 1.1276259652063807\n";
        let (p, closed) = parse_points(text).unwrap();
        assert_eq!(p.len(), 2);
        assert!(closed);
        assert!(parse_points("0 0 2\n").is_err());
        assert!(parse_points("0 0\n").is_err());
    }
}
