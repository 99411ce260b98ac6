use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("grid does not cover the domain: {0}")]
    Coverage(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("argument outside the function domain: {0}")]
    FunctionDomain(String),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("incident field placement: {0}")]
    Placement(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate medium: {0}")]
    DegenerateMedium(String),

    #[error("degenerate angular order m = {order}: {reason}")]
    DegenerateOrder { order: i64, reason: String },

    #[error("singular system (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("automatic cutoff failed: {0}")]
    Cutoff(String),

    #[error("recovery undefined: {0}")]
    Recovery(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("config validation: {0}")]
    Validation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("column {column}: {source}")]
    Column {
        column: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the run driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Parse { .. } => 2,
            Error::Io(_) => 4,
            Error::Column { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Domain(_) => "domain",
            Error::Coverage(_) => "coverage",
            Error::Resolution(_) => "resolution",
            Error::FunctionDomain(_) => "function_domain",
            Error::Singularity(_) => "singularity",
            Error::Placement(_) => "placement",
            Error::Precondition(_) => "precondition",
            Error::Shape(_) => "shape",
            Error::DegenerateMedium(_) => "degenerate_medium",
            Error::DegenerateOrder { .. } => "degenerate_order",
            Error::Singular { .. } => "singular",
            Error::Convergence(_) => "convergence",
            Error::Cutoff(_) => "cutoff",
            Error::Recovery(_) => "recovery",
            Error::UndefinedRatio(_) => "undefined_ratio",
            Error::Validation(_) => "validation",
            Error::Parse { .. } => "parse",
            Error::Column { source, .. } => source.kind(),
            Error::Io(_) => "io",
        }
    }
}
