use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the numerics can report.
///
/// Variants are grouped loosely by the module that raises them; [`Error::kind`]
/// gives the stable record name used in machine-readable error output.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // geometry
    #[error("hole disks {0} and {1} intersect or touch")]
    Overlap(usize, usize),
    #[error("hole {0} is not strictly inside the outer circle")]
    Containment(usize),
    #[error("base point {0} is not in the domain")]
    BasePoint(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("resolution too small: {0}")]
    Resolution(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("point {0} is not in the open domain")]
    Domain(String),

    // laplace
    #[error("least-squares system ill-conditioned (condition {condition:.3e} > {limit:.3e})")]
    IllConditioned { condition: f64, limit: f64 },
    #[error("boundary misfit {residual:.3e} exceeds tolerance {tol:.3e}")]
    Residual { residual: f64, tol: f64 },
    #[error("harmonic measure mass {mass} deviates from 1 by more than {tol:.3e}")]
    Mass { mass: f64, tol: f64 },
    #[error("period on hole {hole}: quadrature {quadrature} vs log coefficient {series}")]
    PeriodMismatch { hole: usize, quadrature: f64, series: f64 },
    #[error("matrix is numerically singular (smallest singular value {0:.3e})")]
    SingularMatrix(f64),
    #[error("harmonic function has nonzero period {period:.3e} around hole {hole}")]
    NonzeroPeriod { hole: usize, period: f64 },

    // hardy
    #[error("boundary data out of the admissible range: {0}")]
    UnboundedData(String),
    #[error("winding number around component {component} is not an integer (defect {defect:.3})")]
    NonIntegerWinding { component: usize, defect: f64 },
    #[error("function vanishes on the boundary near {0}")]
    BoundaryZero(String),
    #[error("series fit residual {residual:.3e} exceeds {tol:.3e}")]
    Fit { residual: f64, tol: f64 },
    #[error("zero on or too close to the boundary: {0}")]
    ZeroOnBoundary(String),
    #[error("zero localization failed: {0}")]
    ZeroLocalization(String),
    #[error("precondition violated: {0}")]
    Precondition(String),

    // gauge
    #[error("dual-norm solver did not converge: {0}")]
    Convergence(String),
    #[error("gauge axiom violated: {0}")]
    AxiomViolation(String),

    // galerkin
    #[error("generated subspace collapsed: {0}")]
    RankCollapse(String),
    #[error("extremal problem degenerate: {0}")]
    ExtremalDegenerate(String),

    // configuration and io
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable record name for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Overlap(..) => "OverlapError",
            Error::Containment(..) => "ContainmentError",
            Error::BasePoint(..) => "BasePointError",
            Error::InvalidGeometry(..) => "InvalidGeometryError",
            Error::Resolution(..) => "ResolutionError",
            Error::Shape(..) => "ShapeError",
            Error::Domain(..) => "DomainError",
            Error::IllConditioned { .. } => "IllConditionedError",
            Error::Residual { .. } => "ResidualError",
            Error::Mass { .. } => "MassError",
            Error::PeriodMismatch { .. } => "PeriodMismatchError",
            Error::SingularMatrix(..) => "SingularMatrixError",
            Error::NonzeroPeriod { .. } => "NonzeroPeriodError",
            Error::UnboundedData(..) => "UnboundedDataError",
            Error::NonIntegerWinding { .. } => "NonIntegerWindingError",
            Error::BoundaryZero(..) => "BoundaryZeroError",
            Error::Fit { .. } => "FitError",
            Error::ZeroOnBoundary(..) => "ZeroOnBoundaryError",
            Error::ZeroLocalization(..) => "ZeroLocalizationError",
            Error::Precondition(..) => "PreconditionError",
            Error::Convergence(..) => "ConvergenceError",
            Error::AxiomViolation(..) => "AxiomViolation",
            Error::RankCollapse(..) => "RankCollapseError",
            Error::ExtremalDegenerate(..) => "ExtremalDegenerateError",
            Error::Config(..) => "ConfigError",
            Error::Io(..) => "IoError",
        }
    }

    /// True for errors caused by the input description rather than the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Overlap(..)
                | Error::Containment(..)
                | Error::BasePoint(..)
                | Error::InvalidGeometry(..)
                | Error::Resolution(..)
                | Error::Config(..)
                | Error::Io(..)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
