use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("height {0} outside the support [-1, 1]")]
    HeightOutOfSupport(f64),
    #[error("the two curves coincide")]
    IdenticalCurves,
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    #[error("configuration violates the dyadic preconditions: {0}")]
    ConfigurationViolation(String),
    #[error("no solution ({0})")]
    NoSolution(String),
    #[error("matrix is not in companion-block form: {0}")]
    NotCompanionForm(String),
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error("no admissible vector: {0}")]
    NoSuchVector(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("resolution too fine: {0}")]
    ResolutionTooFine(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
