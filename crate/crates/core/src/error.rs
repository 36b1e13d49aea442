use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("field is singular at (y, z) = ({y}, {z}): {reason}")]
    FieldSingular { y: f64, z: f64, reason: String },

    #[error("expression `{name}` is singular at {at}: {reason}")]
    ExpressionSingular { name: String, at: f64, reason: String },

    #[error("tangent vectors are based at different points")]
    BasePointMismatch,

    #[error("curve velocity is null near t = {t} (g(c', c') = {norm:e})")]
    NullSegment { t: f64, norm: f64 },

    #[error("curvature {kappa:e} at s = {s} is at or below the straight-line threshold")]
    DegenerateCurvature { s: f64, kappa: f64 },

    #[error("frame re-orthonormalization moved a vector by {correction:e} at s = {s}")]
    FrameDriftExceeded { s: f64, correction: f64 },

    #[error("surface partials are dependent at (u, v) = ({u}, {v})")]
    DegeneratePatch { u: f64, v: f64 },

    #[error("surface is not timelike at (u, v) = ({u}, {v}): g(n, n) = {norm:e}")]
    NotTimelikeSurface { u: f64, v: f64, norm: f64 },

    #[error("curve leaves the surface at s = {s} (chart distance {distance:e})")]
    CurveOffSurface { s: f64, distance: f64 },

    #[error("tangent is null at s = {s}")]
    NullTangent { s: f64 },

    #[error("hyperbolic angle undefined: artanh argument {ratio} has magnitude >= 1")]
    HyperbolicDomain { ratio: f64 },

    #[error("angle undefined: geodesic and normal curvature both vanish")]
    AngleUndefined,

    #[error("unsupported combination: {case} with {kind}")]
    UnsupportedCombination { case: String, kind: String },

    #[error("step-halving changed the solution by {change:e} (limit 1e-4)")]
    StepTooLarge { change: f64 },

    #[error("branch discriminant {discriminant:e} lies in the ambiguity band")]
    BranchAmbiguous { discriminant: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("hypothesis cannot be realized: {0}")]
    HypothesisUnsatisfiable(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Config(_) | Error::Io(_) | Error::UnsupportedCombination { .. })
    }
}
