use num_complex::Complex64;
use thiserror::Error;

/// Details of a quadrature that ran out of subdivisions.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureFailure {
    /// Best estimate reached, one entry per integrand component.
    pub estimate: Vec<Complex64>,
    pub achieved_error: f64,
    pub requested_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge within {} panels: error {:.3e} > {:.3e}",
        .0.panels, .0.achieved_error, .0.requested_error
    )]
    Accuracy(Box<QuadratureFailure>),

    #[error("numerical conditioning error at E = {energy}: condition estimate {condition:.3e}")]
    Conditioning { energy: f64, condition: f64 },

    #[error("capability error: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
