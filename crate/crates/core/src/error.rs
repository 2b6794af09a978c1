use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate coupling: {0}")]
    DegenerateCoupling(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations: estimate {estimate:e}, error bound {error:e}"
    )]
    NonConvergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("integrand returned non-finite value {value} at omega = {omega:e}")]
    NonFinite { omega: f64, value: f64 },

    #[error("argument {0} outside the supported domain [-1, 1]")]
    Domain(f64),

    #[error("form-factor clusters overlap: closest points are {distance:e} apart, need more than {minimum:e}")]
    Overlap { distance: f64, minimum: f64 },

    #[error("infrared divergence: {0}")]
    InfraredDivergence(String),

    #[error("no waveguide mode lies below the mass cutoff {0}")]
    EmptyChannelSet(f64),

    #[error("lattice precondition violated: {0}")]
    LatticePrecondition(String),

    #[error("lattice Hamiltonian is indefinite: smallest eigenvalue {0:e}")]
    IndefiniteMatrix(f64),

    #[error("eigensolver did not converge")]
    EigenNonConvergence,

    #[error("bisection did not converge on bracket [{lo:e}, {hi:e}]")]
    BisectionNonConvergence { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, CasimirError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CasimirError::InvalidInput(msg.into()))
}
