use thiserror::Error;

/// Failures of jet arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jets live in different spaces: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("argument {index} of a composition has a nonzero constant term")]
    NonzeroConstantArgument { index: usize },
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("reciprocal of a jet with zero constant term")]
    ZeroConstantTerm,
    #[error("square root needs a positive real constant term")]
    NonPositiveConstantTerm,
    #[error("value is not representable exactly in this mode: {0}")]
    NotRepresentable(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix shapes do not match: {0}")]
    Shape(String),
    #[error("constant-term matrix is singular")]
    Singular,
}

/// Failures while ingesting metric and vector-field expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{message} at offset {offset}")]
    Syntax { offset: usize, message: String },
    #[error("metric is not symmetric: g{i}{j} and g{j}{i} differ")]
    NotSymmetric { i: usize, j: usize },
    #[error("constant term of the metric is not positive definite")]
    NotPositiveDefinite,
    #[error("vector field vanishes at the chart center")]
    VanishingField,
    #[error("{0}")]
    Jet(#[from] JetError),
}

impl ParseError {
    /// Byte offset into the source, when the error has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

/// Failures of the chart, structure and solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("Gram-Schmidt degenerated: projection of coordinate vector {0} vanishes at the chart center")]
    DegenerateFrame(usize),
    #[error("Jacobian of the holomorphic coordinates is singular at the chart center")]
    SingularJacobian,
    #[error("pivot dG/dphi_tt vanishes at the chart center")]
    ZeroPivot,
    #[error("order-zero Newton iteration did not converge in {0} steps")]
    NewtonDiverged(usize),
    #[error("order {order} is below the minimum of {min}")]
    OrderTooLow { order: usize, min: usize },
    #[error("determinant of the Hessian has non-positive constant term")]
    NonPositiveDeterminant,
    #[error("Hermitian matrix check failed: asymmetry {0:e}")]
    NotHermitian(f64),
}

/// Failures reading or writing jet archives.
#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("not a jet archive (expected `{expected}`, found `{found}`)")]
    Version { expected: String, found: String },
    #[error("checksum mismatch or missing checksum line")]
    Checksum,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("archive is in {found} mode, expected {expected}")]
    ModeMismatch { expected: String, found: String },
}

/// A scenario configuration problem, located in its source when possible.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub origin: String,
    /// 1-based; 0 when the problem has no position (e.g. a command-line flag).
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.origin, self.message)
        } else {
            write!(
                f,
                "{}:{}:{}: {}",
                self.origin, self.line, self.column, self.message
            )
        }
    }
}
