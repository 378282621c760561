use thiserror::Error;

/// Errors produced by the evaluators and solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("{op}: series did not converge after {terms} terms ({reason})")]
    NonConvergent {
        op: &'static str,
        terms: usize,
        reason: String,
    },

    #[error("rational approximation of alpha needs denominator {k} > cap {cap}")]
    DenominatorTooLarge { k: u32, cap: u32 },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("talbot and stehfest disagree: {talbot} vs {stehfest} (rel. diff {rel:.3e} > gate {gate:.1e})")]
    MethodDisagreement {
        talbot: f64,
        stehfest: f64,
        rel: f64,
        gate: f64,
    },

    #[error("numerical overflow in {0}")]
    NumericalOverflow(&'static str),

    #[error("route unavailable: {0}")]
    RouteUnavailable(String),

    #[error("grid too coarse: step-halving change {change:.3e} exceeds {tol:.1e} at {steps} steps")]
    GridTooCoarse { change: f64, tol: f64, steps: usize },

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),
}

impl Error {
    /// Short variant name, used for diagnostics and exit-code mapping.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParam(_) => "InvalidParam",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::DenominatorTooLarge { .. } => "DenominatorTooLarge",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::MethodDisagreement { .. } => "MethodDisagreement",
            Error::NumericalOverflow(_) => "NumericalOverflow",
            Error::RouteUnavailable(_) => "RouteUnavailable",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::GridTooNarrow(_) => "GridTooNarrow",
        }
    }

    /// Whether this error stems from bad input rather than a numerical failure.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParam(_) | Error::DenominatorTooLarge { .. } | Error::GridTooNarrow(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
