use thiserror::Error;

/// Every failure the library can report. `code()` gives the stable
/// machine-readable name used by the CLI.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("both polynomials are zero")]
    BothZero,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("root certification failed up to {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is reducible over Q: {0}")]
    NotIrreducible(String),
    #[error("no irreducibility certificate found for {0}")]
    Unverifiable(String),
    #[error("automorphism image #{index} is not a root of the defining polynomial")]
    BadAutomorphism { index: usize },
    #[error("automorphism images are not closed under composition")]
    NotClosed,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is zero")]
    ZeroElement,
    #[error("order Z[theta] is not maximal at p = {p} and p has several places")]
    NonMaximalOrder { p: u64 },
    #[error("unsupported place {0}")]
    UnsupportedPlace(String),
    #[error("embedding into level {level} is not a root; residual coordinates {residual:?}")]
    BadEmbedding { level: usize, residual: Vec<String> },
    #[error("tower level {0} is not Galois over Q")]
    NotGalois(usize),
    #[error("restriction of {0} is ambiguous")]
    AmbiguousRestriction(String),
    #[error("measure refinement mismatch at {0}")]
    RefinementMismatch(String),
    #[error("action on {0} is ambiguous")]
    AmbiguousAction(String),
    #[error("automorphism does not stabilize the subfield at level {0}")]
    NotStabilized(usize),
    #[error("L^p exponent must be at least 1, got {0}")]
    BadExponent(String),
    #[error("step functions live on different towers or levels")]
    LevelMismatch,
    #[error("generator is not an S-unit at {0}")]
    NotAnSUnit(String),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("target is not in X: integral = {0}")]
    NotInX(String),
    #[error("basis is empty")]
    EmptyBasis,
    #[error("prime {0} exceeds the supported range")]
    PrimeTooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::BothZero => "BothZero",
            Error::NotSquarefree => "NotSquarefree",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NotMonic => "NotMonic",
            Error::NotIrreducible(_) => "NotIrreducible",
            Error::Unverifiable(_) => "Unverifiable",
            Error::BadAutomorphism { .. } => "BadAutomorphism",
            Error::NotClosed => "NotClosed",
            Error::FieldMismatch => "FieldMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::ZeroElement => "ZeroElement",
            Error::NonMaximalOrder { .. } => "NonMaximalOrder",
            Error::UnsupportedPlace(_) => "UnsupportedPlace",
            Error::BadEmbedding { .. } => "BadEmbedding",
            Error::NotGalois(_) => "NotGalois",
            Error::AmbiguousRestriction(_) => "AmbiguousRestriction",
            Error::RefinementMismatch(_) => "RefinementMismatch",
            Error::AmbiguousAction(_) => "AmbiguousAction",
            Error::NotStabilized(_) => "NotStabilized",
            Error::BadExponent(_) => "BadExponent",
            Error::LevelMismatch => "LevelMismatch",
            Error::NotAnSUnit(_) => "NotAnSUnit",
            Error::BadShape(_) => "BadShape",
            Error::NotInX(_) => "NotInX",
            Error::EmptyBasis => "EmptyBasis",
            Error::PrimeTooLarge(_) => "PrimeTooLarge",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
