use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("entry ({row},{col}) = {value} is not divisible by {modulus}")]
    DivisibilityViolation {
        row: usize,
        col: usize,
        value: i64,
        modulus: i64,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("scale exceeded: {what} = {got} above bound {bound}")]
    ScaleExceeded { what: String, got: u64, bound: u64 },
    #[error("family {0} is not multiplicative and subgroup-closed")]
    FamilyNotSubmultiplicative(String),
    #[error("family {0} is not a multiplicative global family")]
    FamilyNotGlobalMultiplicative(String),
    #[error("family {0} is not expansive")]
    FamilyNotExpansive(String),
    #[error("family {0} is not supported here")]
    FamilyUnsupported(String),
    #[error("family {0} is not of type A-infinity: {1}")]
    NotAInfinity(String, String),
    #[error("{group} is not in family {family}")]
    NotInFamily { group: String, family: String },
    #[error("morphism is not surjective")]
    NotSurjective,
    #[error("resolution did not terminate within depth {0}")]
    DepthExceeded(usize),
    #[error("no colimit tower for family {0}")]
    TowerUnavailable(String),
    #[error("tower did not stabilize within {0} stages")]
    NotStabilized(usize),
    #[error("map is not dagger-monotone")]
    NotDagMonotone,
    #[error("invalid framing: {0}")]
    InvalidFraming(String),
    #[error("parse error at {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("corrupt cache entry {0}")]
    CacheCorrupt(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable code for the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisibilityViolation { .. } => "divisibility_violation",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::NotASubgroup(_) => "not_a_subgroup",
            Error::ScaleExceeded { .. } => "scale_exceeded",
            Error::FamilyNotSubmultiplicative(_) => "family_not_submultiplicative",
            Error::FamilyNotGlobalMultiplicative(_) => "family_not_global_multiplicative",
            Error::FamilyNotExpansive(_) => "family_not_expansive",
            Error::FamilyUnsupported(_) => "family_unsupported",
            Error::NotAInfinity(..) => "not_a_infinity",
            Error::NotInFamily { .. } => "not_in_family",
            Error::NotSurjective => "not_surjective",
            Error::DepthExceeded(_) => "depth_exceeded",
            Error::TowerUnavailable(_) => "tower_unavailable",
            Error::NotStabilized(_) => "not_stabilized",
            Error::NotDagMonotone => "not_dag_monotone",
            Error::InvalidFraming(_) => "invalid_framing",
            Error::ParseError { .. } => "parse_error",
            Error::CacheCorrupt(_) => "cache_corrupt",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
