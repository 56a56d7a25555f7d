use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library.
///
/// Variants are stable: the CLI maps each one to a fixed message prefix
/// through [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A fractional power has no exact rational value.
    #[error("exact backend cannot represent {0}; use the float backend")]
    ExactBackendRootNeeded(String),
    /// The leading coefficient of a solution needs an irrational m-th root.
    #[error("root is not rational: {0}")]
    RootNotExact(String),
    /// A transcendental function was evaluated at a point where the exact
    /// backend has no closed form.
    #[error("{0} has no exact rational value; use the float backend")]
    TranscendentalNotExact(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("oracle `{name}` failed: {reason}")]
    Oracle { name: String, reason: String },
    #[error("no nonzero derivative of order <= {cap} at {at} and no flatness declaration")]
    UnresolvedClassification { cap: usize, at: String },
    #[error("solver exceeded its cap of {0} steps")]
    StepCapExceeded(usize),
    #[error("solver invariant violated: {0}")]
    SolverInvariant(String),
    #[error("{0} is not in the slice image")]
    NotInImage(String),
    #[error("no finite order m with a nonvanishing derivative: {0}")]
    NoFiniteM(String),
    #[error("no real preimage: {0}")]
    NoRealPreimage(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("flat point: {0}")]
    FlatSlice(String),
    #[error("polynomial oracle required: {0}")]
    NotPolynomial(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short stable identifier, used for CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ExactBackendRootNeeded(_) => "exact-backend-root-needed",
            Error::RootNotExact(_) => "root-not-exact",
            Error::TranscendentalNotExact(_) => "transcendental-not-exact",
            Error::Domain(_) => "domain",
            Error::Oracle { .. } => "oracle",
            Error::UnresolvedClassification { .. } => "unresolved-classification",
            Error::StepCapExceeded(_) => "step-cap-exceeded",
            Error::SolverInvariant(_) => "solver-invariant",
            Error::NotInImage(_) => "not-in-image",
            Error::NoFiniteM(_) => "no-finite-m",
            Error::NoRealPreimage(_) => "no-real-preimage",
            Error::UnknownName(_) => "unknown-name",
            Error::FlatSlice(_) => "flat-slice",
            Error::NotPolynomial(_) => "not-polynomial",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}
