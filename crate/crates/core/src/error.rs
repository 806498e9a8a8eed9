use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site count mismatch: {left} vs {right}")]
    SiteCountMismatch { left: usize, right: usize },

    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("{sites} sites exceed the dense limit of {limit}")]
    DenseLimit { sites: usize, limit: usize },

    #[error("symbolic strings are limited to {limit} sites, got {sites}")]
    SymbolicLimit { sites: usize, limit: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel `{label}`: {reason}")]
    InvalidChannel { label: String, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Hamiltonian structure: {0}")]
    Structure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("term cap of {cap} exceeded at order {order} ({terms} terms)")]
    TermCap { order: usize, terms: usize, cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
