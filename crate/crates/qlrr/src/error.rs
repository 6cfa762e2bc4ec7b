//! Crate-wide error type.

/// Errors produced by the physics kernels and numerical engines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An input violated a mathematical precondition (sign, range, shape).
    #[error("domain error: {0}")]
    Domain(String),

    /// The bath cutoff exceeds 1/tau_e, which would make the bare mass
    /// negative. Callers may opt in explicitly via the
    /// `allow_negative_bare_mass` override.
    #[error(
        "cutoff constraint violated: Omega = {omega:e} exceeds 1/tau_e = {inv_tau_e:e}; \
         the bare mass m = M(1 - Omega tau_e) would be negative \
         (set allow_negative_bare_mass to override)"
    )]
    CutoffConstraint { omega: f64, inv_tau_e: f64 },

    /// A quadrature, extrapolation, or integration failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Evaluation was requested on or too close to a pole of a response
    /// function.
    #[error("pole error: {0}")]
    Pole(String),

    /// The requested operation is not defined for this input kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Inconsistent or unusable run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// File or parse problem for external inputs (tabulated spectra, samples).
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
