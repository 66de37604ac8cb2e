use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Diagnostic payloads are carried as `f64` regardless of the scalar type
/// the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("series lost precision: cancellation ratio {ratio:e} exceeds {limit:e}")]
    PrecisionLoss { ratio: f64, limit: f64 },

    #[error("Laplace inversion failed quality check: imaginary residue {residue:e} with {nodes} nodes")]
    InversionQuality { residue: f64, nodes: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by invalid input rather than numerics.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
