use thiserror::Error;

/// Errors raised by the solvers and constructors in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The weight `exp(-potential)` would leave the binary64 range.
    #[error("measure underflow: weight exponent {exponent:.3} exceeds the guard of {limit}")]
    MeasureUnderflow { exponent: f64, limit: f64 },

    #[error("iteration did not converge after {iterations} iterations (best estimate {estimate:.6e}, residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("edge graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error(
        "closure functional has the same sign at both bracket ends (r_lo = {r_lo}, r_hi = {r_hi}); widen the bracket"
    )]
    BracketFailure { r_lo: f64, r_hi: f64 },

    /// Curvature is not resolved by the integration step.
    #[error("resolution guard: |k| = {curvature:.4e} exceeds 1/(10 h) = {limit:.4e}")]
    Resolution { curvature: f64, limit: f64 },

    #[error("trivial case: {0}")]
    TrivialCase(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
