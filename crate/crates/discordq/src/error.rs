use thiserror::Error;

/// Errors shared across the covariance, integration, and oracle layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The covariance matrix fails the two-mode physicality test.
    #[error("covariance matrix is not a physical two-mode state: {0}")]
    NonPhysical(String),

    /// The invariants extracted from a covariance matrix are mutually
    /// inconsistent (negative discriminant beyond tolerance).
    #[error("standard-form invariants are degenerate (discriminant {discriminant:.3e})")]
    DegenerateInvariants { discriminant: f64 },

    /// A covariance matrix that should be positive definite is not.
    #[error("covariance matrix is singular or not positive definite")]
    SingularCovariance,

    /// Parameters passed to a constructor do not satisfy its contract.
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    /// The Gaussian kernel does not decay in every direction.
    #[error("kernel does not define a convergent integral: {0}")]
    Divergent(String),

    /// The kernel matrix is too close to singular for a trustworthy result.
    #[error("kernel matrix is ill-conditioned (condition estimate {cond:.3e})")]
    IllConditioned { cond: f64 },

    /// A quantity that must be real came out with a non-negligible
    /// imaginary part; signals an assembly bug, not an input problem.
    #[error("result {value:.6e} has imaginary residue {imag:.3e}")]
    ComplexResidue { value: f64, imag: f64 },

    /// A truncated Fock-space state lost too much trace.
    #[error("truncation lost trace {deficit:.3e} (limit {limit:.1e}); increase the dimension")]
    TruncationError { deficit: f64, limit: f64 },

    /// The Fock-dimension refinement did not settle.
    #[error("Fock evaluation did not converge; history {history:?}")]
    NonConverged { history: Vec<(usize, f64)> },

    /// Malformed input data (files, parameters, grids).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable token, used as the status column in scans.
    pub fn status_token(&self) -> &'static str {
        match self {
            Error::NonPhysical(_) => "non-physical",
            Error::DegenerateInvariants { .. } => "degenerate-invariants",
            Error::SingularCovariance => "singular-covariance",
            Error::ParamMismatch(_) => "param-mismatch",
            Error::Divergent(_) => "divergent",
            Error::IllConditioned { .. } => "ill-conditioned",
            Error::ComplexResidue { .. } => "complex-residue",
            Error::TruncationError { .. } => "truncation-error",
            Error::NonConverged { .. } => "non-converged",
            Error::InvalidInput(_) => "invalid-input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
