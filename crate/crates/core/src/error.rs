use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are grouped by [`ErrorKind`], which the CLI maps onto exit
/// codes and the `{"error": {"kind": ..}}` JSON payload.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("exponent at byte {offset} is not a nonnegative integer")]
    BadExponent { offset: usize },

    #[error("arity mismatch: expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("resultant is degenerate: both polynomials have degree 0 in the eliminated variable")]
    DegenerateResultant,

    #[error("invalid degrees ({d_f}, {d_g}): {reason}")]
    InvalidDegrees { d_f: u32, d_g: u32, reason: String },

    #[error("coefficient index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("point is not on the curve (residual {residual:e})")]
    OffCurve { residual: f64 },

    #[error("elimination degenerates: {0}")]
    Elimination(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("base coordinate is singular here (J1 = 0); change coordinate: {0}")]
    ChartSingular(String),

    #[error("Newton iteration did not converge: {0}")]
    NewtonDiverged(String),

    #[error("path tracking step underflow at base value {at}")]
    StepUnderflow { at: String },

    #[error("numerical result did not converge: {0}")]
    NoConvergence(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("io: {0}")]
    Io(String),
}

/// Coarse classification of [`Error`] used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    MathDomain,
    Convergence,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Syntax { .. }
            | UnknownVariable { .. }
            | BadExponent { .. }
            | Arity { .. }
            | InvalidDegrees { .. }
            | IndexOutOfRange(_)
            | Invalid(_)
            | Io(_) => ErrorKind::Usage,
            DegenerateResultant
            | OffCurve { .. }
            | Elimination(_)
            | Pole(_)
            | ChartSingular(_)
            | SingularMatrix(_) => ErrorKind::MathDomain,
            NewtonDiverged(_) | StepUnderflow { .. } | NoConvergence(_) => {
                ErrorKind::Convergence
            }
        }
    }

    /// Short machine-readable tag for JSON error payloads.
    pub fn tag(&self) -> &'static str {
        use Error::*;
        match self {
            Syntax { .. } => "syntax",
            UnknownVariable { .. } => "unknown_variable",
            BadExponent { .. } => "bad_exponent",
            Arity { .. } => "arity",
            DegenerateResultant => "degenerate_resultant",
            InvalidDegrees { .. } => "invalid_degrees",
            IndexOutOfRange(_) => "index_out_of_range",
            Invalid(_) => "invalid",
            OffCurve { .. } => "off_curve",
            Elimination(_) => "elimination",
            Pole(_) => "pole",
            ChartSingular(_) => "chart_singular",
            NewtonDiverged(_) => "newton_diverged",
            StepUnderflow { .. } => "step_underflow",
            NoConvergence(_) => "no_convergence",
            SingularMatrix(_) => "singular_matrix",
            Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
