use thiserror::Error;

/// Errors raised by the geometric and dynamical routines.
///
/// Verifiers never return these for a failed axiom; findings go into their
/// reports. An `Error` means the input itself could not be processed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no projective class (norm {norm:e})")]
    ZeroVector { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("matrix is singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("ill-conditioned spectral data: {0}")]
    IllConditioned(String),

    #[error("map has finite order {order}")]
    FiniteOrder { order: u32 },

    #[error("spectrum is not unit-modulus (max deviation {deviation:e})")]
    NonUnitarySpectrum { deviation: f64 },

    #[error("spectral radius {radius} is not below |lambda| = {bound}")]
    SpectralRadiusViolation { radius: f64, bound: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("denominator form is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("region form has degenerate signature ({positive} positive, {negative} negative eigenvalues)")]
    DegenerateSignature { positive: usize, negative: usize },

    #[error("projective dimension {0} is not odd")]
    BadDimension(usize),

    #[error("projective dimension {0} is not even")]
    OddDimension(usize),

    #[error("subspaces {0} and {1} intersect")]
    SubspacesNotDisjoint(usize, usize),

    #[error("alpha = {0} is outside (0, 1/2)")]
    AlphaOutOfRange(f64),

    #[error("word is not reduced at position {0}")]
    NotReduced(usize),

    #[error("sample point {0} is not in the interior of the fundamental domain")]
    PointNotInDomain(usize),

    #[error("map has a single modulus class; the bridge set degenerates to L(g)")]
    SingleModulusClass,

    #[error("eigenvalue computation did not converge")]
    EigenFailure,

    #[error("unknown tolerance key `{0}`")]
    UnknownTolerance(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
