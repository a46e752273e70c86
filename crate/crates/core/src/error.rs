use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("{k} does not divide the root-of-unity order {m}")]
    RootOrderNotDivisor { k: u64, m: u64 },
    #[error("division by an element that is zero to working precision")]
    DivisionByZeroToPrecision,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("the discriminant is not a square in the working field")]
    ExtensionRequired,
    #[error("the identity map fixes every point")]
    IdentityMap,
    #[error("map fixes infinity; no isometric circle")]
    FixesInfinity,
    #[error("points are not certified distinct")]
    CoincidentPoints,
    #[error("degenerate cross-ratio tuple")]
    DegenerateTuple,
    #[error("geodesics share an end")]
    SharedEnd,
    #[error("element does not have the declared finite order {0}")]
    NotFiniteOrder(u32),
    #[error("separation bound violated: {0}")]
    BoundViolated(String),
    #[error("odd number of branch points cannot be paired")]
    OddTermCount,
    #[error("invalid Kummer equation: {0}")]
    InvalidEquation(String),
    #[error("invalid cover specification: {0}")]
    InvalidCoverSpec(String),
    #[error("invalid ramification data: {0}")]
    InvalidRamification(String),
    #[error("assignment does not generate the cyclic target group")]
    NonGenerating,
    #[error("kernel meets a conjugate of a factor nontrivially")]
    KernelHasTorsion,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used by the command-line surface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NOT_PRIME",
            Error::InvalidField(_) => "INVALID_FIELD",
            Error::FieldMismatch => "FIELD_MISMATCH",
            Error::RootOrderNotDivisor { .. } => "ROOT_ORDER_NOT_DIVISOR",
            Error::DivisionByZeroToPrecision => "DIVISION_BY_ZERO_TO_PRECISION",
            Error::InsufficientPrecision(_) => "INSUFFICIENT_PRECISION",
            Error::ExtensionRequired => "EXTENSION_REQUIRED",
            Error::IdentityMap => "IDENTITY_MAP",
            Error::FixesInfinity => "FIXES_INFINITY",
            Error::CoincidentPoints => "COINCIDENT_POINTS",
            Error::DegenerateTuple => "DEGENERATE_TUPLE",
            Error::SharedEnd => "SHARED_END",
            Error::NotFiniteOrder(_) => "NOT_FINITE_ORDER",
            Error::BoundViolated(_) => "BOUND_VIOLATED",
            Error::OddTermCount => "ODD_TERM_COUNT",
            Error::InvalidEquation(_) => "INVALID_EQUATION",
            Error::InvalidCoverSpec(_) => "INVALID_COVER_SPEC",
            Error::InvalidRamification(_) => "INVALID_RAMIFICATION",
            Error::NonGenerating => "NON_GENERATING",
            Error::KernelHasTorsion => "KERNEL_HAS_TORSION",
            Error::Parse(_) => "PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
