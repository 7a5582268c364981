//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Decoherence time is undefined: equal Fock labels or zero mode forces.
    #[error("no decoherence: {0}")]
    NoDecoherence(String),

    /// Matrix passed to an inversion/rebasis routine is singular on the
    /// truncated space.
    #[error("singular matrix: pivot magnitude {pivot:.3e} below threshold")]
    SingularMatrix { pivot: f64 },

    /// Grid would not contain the packet; carries usable bounds.
    #[error(
        "grid domain [{x_min}, {x_max}] too narrow for the packet; \
         suggested bounds [{suggest_min}, {suggest_max}]"
    )]
    DomainTooNarrow {
        x_min: f64,
        x_max: f64,
        suggest_min: f64,
        suggest_max: f64,
    },

    /// Two grid states live on different grids.
    #[error("grid mismatch: ({0}) vs ({1})")]
    GridMismatch(String, String),

    /// Step-doubling did not reach the requested tolerance; both final
    /// Richardson estimates are reported.
    #[error(
        "grid propagation did not converge to {tol:.3e} after {steps} steps; \
         last two step-doubling residuals {previous:.3e}, {achieved:.3e}"
    )]
    NotConverged {
        tol: f64,
        steps: usize,
        previous: f64,
        achieved: f64,
    },

    /// Amplitude leaked to the grid edges (wrap-around guard).
    #[error("wrap-around detected: edge amplitude {edge:.3e} exceeds {limit:.3e}")]
    WrapAround { edge: f64, limit: f64 },

    /// Request exceeds a documented size bound.
    #[error("refused: {0}")]
    Refused(String),

    /// Configuration file is syntactically or semantically invalid.
    #[error("config error: {0}")]
    Config(String),

    /// Plot input unusable (empty or single-row table, missing column).
    #[error("plot error: {0}")]
    Plot(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
