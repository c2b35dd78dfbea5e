use thiserror::Error;

/// Errors raised by the library.
///
/// Failures that are answers rather than faults (an undecided search, a
/// bounded periodicity verdict, a failed audit) are returned as values, not
/// as errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operation needs a nontrivial word")]
    TrivialWord,

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("invalid letter name `{0}`")]
    InvalidName(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("length cap of {cap} letters exceeded")]
    LengthCap { cap: usize },

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("power iteration did not converge after {iterations} steps (residual {residual:e}, lambda ~ {lambda})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        lambda: f64,
        last: Vec<f64>,
    },

    #[error("matrix dimensions do not match ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("letter `{0}` is not a proper prefix of its own image")]
    NotPrefix(String),

    #[error("orbit of `{0}` stops growing before reaching the requested length")]
    NonGrowing(String),

    #[error("substitution does not commute with the flip map")]
    NotFlipEquivariant,

    #[error("maps are defined over different bases")]
    BasisMismatch,

    #[error("operation needs rank 2, got rank {0}")]
    RankNotTwo(usize),

    #[error("abelianization has determinant {0}, not +-1")]
    NotUnimodular(i128),

    #[error("edge `{edge}` maps across the filtration: its image contains `{offender}` of greater height")]
    FiltrationViolation { edge: String, offender: String },

    #[error("path is not tight at position {0}")]
    NotTight(usize),

    #[error("edges do not compose at position {0}")]
    NotComposable(usize),

    #[error("edge `{0}` has a trivial image")]
    TrivialImage(String),

    #[error("image of edge `{edge}` does not join the images of its endpoints")]
    ImageEndpoints { edge: String },

    #[error(
        "expected exactly one exponential stratum on top, found {count} (top is height {top})"
    )]
    ExponentialStrata { count: usize, top: usize },

    #[error("path is not {0}-legal")]
    NotLegal(usize),

    #[error("stratum at height {0} is reducible; refine the filtration")]
    RequiresRefinement(usize),

    #[error("no PF eigendata: top stratum is not exponential")]
    MissingEigendata,

    #[error("coset enumeration exceeded {limit} cosets ({defined} defined, {live} live)")]
    CosetLimit {
        limit: usize,
        defined: usize,
        live: usize,
    },

    #[error("unsupported exponent {0}; finite Burnside oracles exist for 2 and 3")]
    UnsupportedExponent(u32),

    #[error("exponent certification failed up to relator length {0}")]
    CertificationFailed(usize),

    #[error("move does not apply to this word")]
    StaleMove,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
