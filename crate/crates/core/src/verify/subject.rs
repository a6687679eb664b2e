use serde::{Deserialize, Serialize};

use crate::diffgeo::SurfaceJet;
use crate::error::{Error, Result};
use crate::surface::{AmbientPoint, ConstantAngleSurface, SurfaceDescriptor};

/// Deliberate defects used as negative controls for the checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Corruption {
    /// Multiplies the hyperboloid components of F by (1 + amount), pushing the surface off H×R.
    ScaleHyperboloid { amount: f64 },
    /// Checks are told the angle is θ + delta while the geometry keeps θ.
    AngleMismatch { delta: f64 },
    /// Adds amount·(u² + v²)/2 to the height F₄.
    HeightWarp { amount: f64 },
}

impl Corruption {
    fn validate(&self) -> Result<()> {
        let x = match *self {
            Corruption::ScaleHyperboloid { amount } => amount,
            Corruption::AngleMismatch { delta } => delta,
            Corruption::HeightWarp { amount } => amount,
        };
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument("corruption parameter must be finite".into()))
        }
    }
}

/// What the verifier inspects: a surface, possibly corrupted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubjectDescriptor", into = "SubjectDescriptor")]
pub struct Subject {
    surface: ConstantAngleSurface,
    corruption: Option<Corruption>,
}

/// JSON form: a surface descriptor with an optional `corruption` field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectDescriptor {
    #[serde(flatten)]
    pub surface: SurfaceDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<Corruption>,
}

impl TryFrom<SubjectDescriptor> for Subject {
    type Error = Error;
    fn try_from(d: SubjectDescriptor) -> Result<Self> {
        let s = Subject::new(ConstantAngleSurface::try_from(d.surface)?);
        match d.corruption {
            Some(c) => s.corrupted(c),
            None => Ok(s),
        }
    }
}

impl From<Subject> for SubjectDescriptor {
    fn from(s: Subject) -> Self {
        SubjectDescriptor { surface: s.surface.into(), corruption: s.corruption }
    }
}

impl From<ConstantAngleSurface> for Subject {
    fn from(s: ConstantAngleSurface) -> Self {
        Subject::new(s)
    }
}

impl Subject {
    pub fn new(surface: ConstantAngleSurface) -> Self {
        Subject { surface, corruption: None }
    }

    pub fn corrupted(mut self, c: Corruption) -> Result<Self> {
        c.validate()?;
        self.corruption = Some(c);
        Ok(self)
    }

    pub fn surface(&self) -> &ConstantAngleSurface {
        &self.surface
    }

    pub fn corruption(&self) -> Option<Corruption> {
        self.corruption
    }

    /// The angle the checks compare against.
    pub fn declared_theta(&self) -> f64 {
        match self.corruption {
            Some(Corruption::AngleMismatch { delta }) => self.surface.theta() + delta,
            _ => self.surface.theta(),
        }
    }

    pub fn immerse(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        let mut p = self.surface.immerse(u, v)?;
        match self.corruption {
            Some(Corruption::ScaleHyperboloid { amount }) => p.h = p.h * (1.0 + amount),
            Some(Corruption::HeightWarp { amount }) => p.t += 0.5 * amount * (u * u + v * v),
            _ => {}
        }
        Ok(p)
    }

    /// Analytic jet of the (possibly corrupted) immersion.
    pub fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        let mut j = self.surface.immerse_jet(u, v)?;
        match self.corruption {
            Some(Corruption::ScaleHyperboloid { amount }) => {
                let k = 1.0 + amount;
                for x in [&mut j.f, &mut j.fu, &mut j.fv, &mut j.fuu, &mut j.fuv, &mut j.fvv] {
                    x.h = x.h * k;
                }
            }
            Some(Corruption::HeightWarp { amount }) => {
                j.f.t += 0.5 * amount * (u * u + v * v);
                j.fu.t += amount * u;
                j.fv.t += amount * v;
                j.fuu.t += amount;
                j.fvv.t += amount;
            }
            _ => {}
        }
        Ok(j)
    }
}
