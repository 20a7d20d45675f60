use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite evaluation: {0}")]
    NonFiniteEvaluation(String),
    #[error("degenerate Gram matrix: {0}")]
    DegenerateGram(String),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("singular kernel cannot be integrated: {0}")]
    SingularMask(String),
    #[error("shell underflow: {0}")]
    ShellUnderflow(String),
    #[error("eigensolver failure: {0}")]
    EigSolveFailure(String),
    #[error("norm matrix is not positive definite: {0}")]
    IndefiniteQ(String),
    #[error("quadrature exactness violated: {0}")]
    ExactnessViolation(String),
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short variant name, used in CSV reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFiniteEvaluation(_) => "NonFiniteEvaluation",
            Error::DegenerateGram(_) => "DegenerateGram",
            Error::DomainError(_) => "DomainError",
            Error::SingularMask(_) => "SingularMask",
            Error::ShellUnderflow(_) => "ShellUnderflow",
            Error::EigSolveFailure(_) => "EigSolveFailure",
            Error::IndefiniteQ(_) => "IndefiniteQ",
            Error::ExactnessViolation(_) => "ExactnessViolation",
            Error::ResolutionTooCoarse(_) => "ResolutionTooCoarse",
            Error::DegenerateGeometry(_) => "DegenerateGeometry",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
