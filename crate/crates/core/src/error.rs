use thiserror::Error;

/// Every failure the numerical routines can report.
///
/// Each variant names the operation that raised it so a front end can say
/// which module ran out of budget or rejected its input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: result overflows f64 at argument {arg}")]
    Overflow { op: &'static str, arg: f64 },

    #[error("quadrature budget exhausted: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureBudget { estimate: f64, error_bound: f64 },

    #[error("{op}: series not converged after {terms} terms (last term {last_term:e})")]
    SeriesBudget {
        op: &'static str,
        terms: usize,
        last_term: f64,
    },

    #[error("{op}: only depths 1..={max} are evaluated analytically, got {depth}; use the Monte Carlo oracle")]
    Depth {
        op: &'static str,
        depth: usize,
        max: usize,
    },

    #[error("estimate requested from an empty sample")]
    EmptySample,

    #[error("invalid Monte Carlo configuration: {0}")]
    McConfig(String),

    #[error("deadline passed during quadrature")]
    Deadline,
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// Module that raised the error, used for diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Domain { op, .. } | Error::Overflow { op, .. } | Error::SeriesBudget { op, .. } => {
                op.split("::").next().unwrap_or(op)
            }
            Error::Depth { .. } => "iterated",
            Error::QuadratureBudget { .. } | Error::Deadline => "quad",
            Error::EmptySample | Error::McConfig(_) => "mcoracle",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
