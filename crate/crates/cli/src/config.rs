//! Command arguments. Each command's flags double as its JSON config file
//! schema: a field given on the command line wins over the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use constant_angle::curve::{load_points, reparametrize_unit_speed, HCurve};
use constant_angle::mesh::Chart;

/// An angle written with an explicit unit: `60deg` or `1.0471975511965976rad`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, scale) = if let Some(n) = s.strip_suffix("deg") {
            (n, std::f64::consts::PI / 180.0)
        } else if let Some(n) = s.strip_suffix("rad") {
            (n, 1.0)
        } else {
            bail!("angle {s:?} needs a unit suffix, e.g. 60deg or 1.047rad");
        };
        let x: f64 = num.trim().parse().with_context(|| format!("bad angle {s:?}"))?;
        if !x.is_finite() {
            bail!("angle {s:?} is not finite");
        }
        Ok(Angle(x * scale))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}rad", self.0)
    }
}

impl TryFrom<String> for Angle {
    type Error = anyhow::Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Angle> for String {
    fn from(a: Angle) -> String {
        a.to_string()
    }
}

/// Closed interval written `a:b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(':').ok_or_else(|| anyhow!("range {s:?} must look like a:b"))?;
        let a: f64 = a.trim().parse().with_context(|| format!("bad range start in {s:?}"))?;
        let b: f64 = b.trim().parse().with_context(|| format!("bad range end in {s:?}"))?;
        if !(a.is_finite() && b.is_finite() && a < b) {
            bail!("range {s:?} must be finite with a < b");
        }
        Ok(Range(a, b))
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

impl TryFrom<String> for Range {
    type Error = anyhow::Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Range> for String {
    fn from(r: Range) -> String {
        r.to_string()
    }
}

/// `geodesic`, `hypercycle:d`, `horocycle`, `circle:rho` or `sampled:path`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CurveArg {
    Geodesic,
    Hypercycle(f64),
    Horocycle,
    Circle(f64),
    Sampled(PathBuf),
}

impl FromStr for CurveArg {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| anyhow!("curve {s:?} needs a parameter"))?
                .parse()
                .with_context(|| format!("bad curve parameter in {s:?}"))
        };
        Ok(match head {
            "geodesic" if arg.is_none() => CurveArg::Geodesic,
            "horocycle" if arg.is_none() => CurveArg::Horocycle,
            "hypercycle" => CurveArg::Hypercycle(num(arg)?),
            "circle" => CurveArg::Circle(num(arg)?),
            "sampled" => CurveArg::Sampled(PathBuf::from(
                arg.filter(|a| !a.is_empty()).ok_or_else(|| anyhow!("sampled curve needs a path"))?,
            )),
            _ => bail!("unknown curve {s:?} (geodesic, hypercycle:d, horocycle, circle:rho, sampled:path)"),
        })
    }
}

impl fmt::Display for CurveArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveArg::Geodesic => f.write_str("geodesic"),
            CurveArg::Hypercycle(d) => write!(f, "hypercycle:{d}"),
            CurveArg::Horocycle => f.write_str("horocycle"),
            CurveArg::Circle(r) => write!(f, "circle:{r}"),
            CurveArg::Sampled(p) => write!(f, "sampled:{}", p.display()),
        }
    }
}

impl TryFrom<String> for CurveArg {
    type Error = anyhow::Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CurveArg> for String {
    fn from(c: CurveArg) -> String {
        c.to_string()
    }
}

impl CurveArg {
    pub fn build(&self) -> Result<HCurve> {
        Ok(match self {
            CurveArg::Geodesic => HCurve::Geodesic,
            CurveArg::Hypercycle(d) => HCurve::hypercycle(*d)?,
            CurveArg::Horocycle => HCurve::Horocycle,
            CurveArg::Circle(r) => HCurve::circle(*r)?,
            CurveArg::Sampled(p) => {
                let (pts, closed) = load_points(p).with_context(|| format!("loading {}", p.display()))?;
                HCurve::Sampled(reparametrize_unit_speed(&pts, closed)?)
            }
        })
    }
}

/// Initial principal curvature: a number, `sin(<angle>)`, or `<k>*sin` meaning k·sinθ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Lambda0 {
    Value(f64),
    SinOf(Angle),
    SinMultiple(f64),
}

impl FromStr for Lambda0 {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("sin(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Lambda0::SinOf(inner.parse()?));
        }
        if let Some(k) = t.strip_suffix("sin") {
            let k = k.trim().trim_end_matches('*').trim();
            let k = if k.is_empty() {
                1.0
            } else if k == "-" {
                -1.0
            } else {
                k.parse().with_context(|| format!("bad multiple in {s:?}"))?
            };
            return Ok(Lambda0::SinMultiple(k));
        }
        let x: f64 = t.parse().with_context(|| format!("bad lambda0 {s:?} (number, sin(<angle>) or <k>*sin)"))?;
        if !x.is_finite() {
            bail!("lambda0 must be finite");
        }
        Ok(Lambda0::Value(x))
    }
}

impl fmt::Display for Lambda0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda0::Value(x) => write!(f, "{x}"),
            Lambda0::SinOf(a) => write!(f, "sin({a})"),
            Lambda0::SinMultiple(k) => write!(f, "{k}*sin"),
        }
    }
}

impl TryFrom<String> for Lambda0 {
    type Error = anyhow::Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Lambda0> for String {
    fn from(l: Lambda0) -> String {
        l.to_string()
    }
}

impl Lambda0 {
    pub fn value(&self, theta: f64) -> f64 {
        match *self {
            Lambda0::Value(x) => x,
            Lambda0::SinOf(a) => a.0.sin(),
            Lambda0::SinMultiple(k) => k * theta.sin(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Export {
    Obj,
    Ply,
    None,
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

macro_rules! overlay {
    ($flags:expr, $file:expr; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field; } )*
    };
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    /// JSON file with any of these options
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Constant angle, e.g. 60deg
    #[arg(long)]
    pub theta: Option<Angle>,
    /// geodesic | hypercycle:d | horocycle | circle:rho | sampled:path
    #[arg(long)]
    pub curve: Option<CurveArg>,
    /// u range a:b (default -1:1, or 0.1:1 for a slice)
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<Range>,
    /// v range a:b (default: one period for closed curves, else -1:1)
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<Range>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    #[arg(long, value_enum)]
    pub export: Option<Export>,
    /// poincare | drop
    #[arg(long)]
    pub chart: Option<Chart>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Shrink the u range to the admissible part instead of failing at the degeneracy locus
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub clip: Option<bool>,
}

impl GenerateArgs {
    pub fn resolve(mut self) -> Result<Self> {
        let file: GenerateArgs = read_config(self.config.as_deref())?;
        overlay!(self, file; theta, curve, u, v, nu, nv, export, chart, out, clip);
        if self.theta.is_none() {
            bail!("--theta is required");
        }
        self.curve.get_or_insert(CurveArg::Geodesic);
        self.nu.get_or_insert(41);
        self.nv.get_or_insert(41);
        self.export.get_or_insert(Export::None);
        self.chart.get_or_insert(Chart::Poincare);
        self.out.get_or_insert_with(|| PathBuf::from("."));
        self.clip.get_or_insert(false);
        Ok(self)
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Surface descriptor JSON (optionally with a "corruption" field)
    pub descriptor: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    /// Finite-difference step
    #[arg(long)]
    pub h: Option<f64>,
    /// Grid inset from the domain boundary, in units of h
    #[arg(long)]
    pub margin: Option<f64>,
    /// Multiplies every tolerance
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
    /// Run only these checks (repeatable)
    #[arg(long = "check")]
    pub checks: Option<Vec<String>>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sequential: Option<bool>,
}

impl VerifyArgs {
    pub fn resolve(mut self) -> Result<Self> {
        let file: VerifyArgs = read_config(self.config.as_deref())?;
        overlay!(self, file; descriptor, nu, nv, h, margin, tolerance_scale, checks, json, sequential);
        if self.descriptor.is_none() {
            bail!("a descriptor file is required");
        }
        resolve_grid(&mut self.nu, &mut self.nv, &mut self.h, &mut self.margin, &mut self.tolerance_scale)?;
        self.sequential.get_or_insert(false);
        Ok(self)
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub theta: Option<Angle>,
    /// Number, sin(<angle>) or <k>*sin
    #[arg(long, allow_hyphen_values = true)]
    pub lambda0: Option<Lambda0>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<Range>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Fails (exit 1) when the closed-form error exceeds this
    #[arg(long)]
    pub max_error: Option<f64>,
    /// Write u,lambda,beta here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl OdeArgs {
    pub fn resolve(mut self) -> Result<Self> {
        let file: OdeArgs = read_config(self.config.as_deref())?;
        overlay!(self, file; theta, lambda0, beta0, u, step, max_error, csv);
        if self.theta.is_none() {
            bail!("--theta is required");
        }
        self.lambda0.get_or_insert(Lambda0::Value(0.0));
        self.beta0.get_or_insert(1.0);
        self.u.get_or_insert(Range(0.0, 2.0));
        self.step.get_or_insert(1e-3);
        self.max_error.get_or_insert(1e-9);
        Ok(self)
    }
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sequential: Option<bool>,
}

impl SuiteArgs {
    pub fn resolve(mut self) -> Result<Self> {
        let file: SuiteArgs = read_config(self.config.as_deref())?;
        overlay!(self, file; nu, nv, h, margin, tolerance_scale, json, sequential);
        resolve_grid(&mut self.nu, &mut self.nv, &mut self.h, &mut self.margin, &mut self.tolerance_scale)?;
        self.sequential.get_or_insert(false);
        Ok(self)
    }
}

fn resolve_grid(
    nu: &mut Option<usize>,
    nv: &mut Option<usize>,
    h: &mut Option<f64>,
    margin: &mut Option<f64>,
    scale: &mut Option<f64>,
) -> Result<()> {
    let g = constant_angle::verify::GridSpec::default();
    nu.get_or_insert(g.nu);
    nv.get_or_insert(g.nv);
    h.get_or_insert(g.h);
    margin.get_or_insert(g.margin);
    let k = *scale.get_or_insert(1.0);
    if !(k > 0.0 && k.is_finite()) {
        bail!("tolerance scale must be positive, got {k}");
    }
    Ok(())
}
