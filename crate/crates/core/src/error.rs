use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} is not on the upper hyperboloid sheet (defect {defect:e})")]
    NotOnHyperboloid { point: [f64; 3], defect: f64 },

    #[error("vector {point:?} is not future-pointing timelike")]
    NotTimelike { point: [f64; 3] },

    #[error("sampled curve needs at least {min} points, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("sampled curve is stationary near sample {index}")]
    DegenerateCurve { index: usize },

    #[error("parameter {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("angle {theta} rad is invalid here: {reason}")]
    InvalidAngle { theta: f64, reason: &'static str },

    #[error("immersion degenerates at u = {u} (beta = {beta:e})")]
    Degenerate { u: f64, beta: f64 },

    #[error("tangent plane is degenerate (Gram determinant {gram:e})")]
    DegenerateTangentPlane { gram: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
