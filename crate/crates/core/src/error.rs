use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants split into two families: input validation (the caller asked for
/// something outside the admissible domain) and numeric failure (a quadrature
/// or series did not reach its tolerance). [`Error::is_numeric`] tells them
/// apart so front ends can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("delta = {delta} outside the admissible range {range}")]
    DeltaOutOfRange { delta: f64, range: &'static str },

    #[error("{name} = {value} must be positive")]
    NonPositiveScale { name: &'static str, value: f64 },

    #[error("input {name} = {value} is not finite")]
    NonFinite { name: &'static str, value: f64 },

    #[error("Gamma pole at alpha = {alpha}")]
    PoleError { alpha: f64 },

    #[error("alpha = {alpha} outside the admissible range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("alpha = {alpha} is an excluded odd-integer exponent")]
    ExcludedAlpha { alpha: f64 },

    #[error("static prefactor diverges at delta = {delta} (|delta - 1| <= {guard})")]
    DeltaPole { delta: f64, guard: f64 },

    #[error("value at the origin is singular")]
    OriginSingular,

    #[error("invalid series order n = {n}")]
    InvalidOrder { n: i64 },

    #[error("parameter a = {a} must be positive")]
    NonPositiveA { a: f64 },

    #[error("grid has {n} points; at least {min} are required")]
    GridTooSmall { n: usize, min: usize },

    #[error("field has {got} samples but the grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("force has mean {mean:e} (tolerance {tol:e}) and projection is disabled")]
    NonZeroMeanForce { mean: f64, tol: f64 },

    #[error("damping eps = {eps} must be positive")]
    EpsNonPositive { eps: f64 },

    #[error("time t = {t} must be positive")]
    TimeNonPositive { t: f64 },

    #[error("time t = {t} is negative; diffusion cannot be run backwards")]
    NegativeTime { t: f64 },

    #[error("closed form requires delta = 1, got {delta}")]
    DeltaMismatch { delta: f64 },

    #[error("half-width L = {l} is not inside the grid (max {max})")]
    LOutOfGrid { l: f64, max: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    QuadratureNoConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("series budget exhausted after {terms} terms: partial sum {partial:e}, tail bound {bound:e}")]
    SeriesBudgetExceeded { partial: f64, bound: f64, terms: usize },

    #[error("series lost its precision to cancellation: sum {partial:e}, largest term {max_term:e}")]
    SeriesCancellation { partial: f64, max_term: f64 },
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DeltaOutOfRange { .. } => "DeltaOutOfRange",
            Error::NonPositiveScale { .. } => "NonPositiveScale",
            Error::NonFinite { .. } => "NonFinite",
            Error::PoleError { .. } => "PoleError",
            Error::AlphaOutOfRange { .. } => "AlphaOutOfRange",
            Error::ExcludedAlpha { .. } => "ExcludedAlpha",
            Error::DeltaPole { .. } => "DeltaPole",
            Error::OriginSingular => "OriginSingular",
            Error::InvalidOrder { .. } => "InvalidOrder",
            Error::NonPositiveA { .. } => "NonPositiveA",
            Error::GridTooSmall { .. } => "GridTooSmall",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::GridMismatch => "GridMismatch",
            Error::NonZeroMeanForce { .. } => "NonZeroMeanForce",
            Error::EpsNonPositive { .. } => "EpsNonPositive",
            Error::TimeNonPositive { .. } => "TimeNonPositive",
            Error::NegativeTime { .. } => "NegativeTime",
            Error::DeltaMismatch { .. } => "DeltaMismatch",
            Error::LOutOfGrid { .. } => "LOutOfGrid",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::QuadratureNoConvergence { .. } => "QuadratureNoConvergence",
            Error::SeriesBudgetExceeded { .. } => "SeriesBudgetExceeded",
            Error::SeriesCancellation { .. } => "SeriesCancellation",
        }
    }

    /// True for failures of a numeric procedure, false for rejected input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNoConvergence { .. }
                | Error::SeriesBudgetExceeded { .. }
                | Error::SeriesCancellation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name, value })
    }
}
