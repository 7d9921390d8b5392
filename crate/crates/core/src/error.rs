use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} out of range (need 2 <= n < 2^31)")]
    InvalidModulus(u64),

    #[error("element {value} is not a nonzero residue mod {modulus}")]
    InvalidElement { value: i64, modulus: u32 },

    #[error("element {value} appears more than once")]
    DuplicateElement { value: u32 },

    #[error("set must contain at least one element")]
    EmptySet,

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("window t = {t} must satisfy 1 <= t < k = {k}")]
    InvalidWindow { t: usize, k: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Greedy extension found no admissible element although the
    /// pigeonhole bound promises one.
    #[error("greedy extension stuck after prefix {prefix:?}")]
    GreedyExhausted { prefix: Vec<u32> },

    #[error("internal invariant broken: {message} (prefix {prefix:?})")]
    InternalInvariant { message: String, prefix: Vec<u32> },

    #[error("state map reached {entries} entries (~{bytes} bytes), above cap of {cap} bytes")]
    ResourceLimit { entries: usize, bytes: u64, cap: u64 },

    #[error("factorization gave up on composite cofactor {0}")]
    Unfactored(String),

    #[error("coefficient of the certificate monomial is zero")]
    ZeroCoefficient,

    #[error("monomial exponent {exponent} at position {index} exceeds ell - 1 = {limit}")]
    MonomialNotDividing {
        index: usize,
        exponent: u32,
        limit: u32,
    },

    #[error("monomial total degree {monomial} differs from system degree {system}")]
    DegreeMismatch { monomial: u64, system: u64 },

    #[error("certificate does not apply: {0}")]
    NotApplicable(String),

    #[error("certificate check failed: {0}")]
    InvalidCertificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
