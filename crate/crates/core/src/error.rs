use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// The variants are grouped by how the CLI reports them: precondition
/// violations (exit 1), exhausted bounds or budgets (exit 2) and
/// verification failures (exit 3). See [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be positive")]
    Zero,
    #[error("{0} exceeds the supported maximum 2^127 - 1")]
    OutOfRange(u128),
    #[error("{0} is not prime")]
    NotPrime(u128),
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("semiprime criterion needs distinct primes, got {0} twice")]
    EqualPrimes(u128),
    #[error("semiprime criterion needs odd primes, got {0}")]
    EvenPrime(u128),
    #[error("semiprime criterion is stated for k >= 2, got k = {0}")]
    SemiprimeExponent(u32),

    #[error("family exponents must differ, got {0} twice")]
    SameExponent(u32),
    #[error("family exponents {n} and {m} differ by an even amount")]
    EvenExponentGap { n: u32, m: u32 },
    #[error("3*2^{exponent}+1 = {value} is not prime")]
    FamilyNotPrime { exponent: u32, value: u128 },
    #[error("({n}, {m}) predicted index {predicted} but observed {observed}")]
    FamilyMismatch {
        n: u32,
        m: u32,
        predicted: u32,
        observed: String,
    },

    #[error("Chernick form needs k >= 3, got {0}")]
    ChernickOrder(u32),
    #[error("{0} does not fit in 127 bits")]
    Overflow(String),

    #[error("{0} is prime; only composites qualify")]
    PrimeInput(u128),
    #[error("{0} is not composite")]
    NotComposite(u128),
    #[error("{0} is not in L_inf")]
    NotInLinf(u128),

    #[error("limit {limit} exceeds the configured maximum {max}")]
    LimitExceeded { limit: u128, max: u128 },
    #[error("limit {0} is not a power of ten")]
    NotPowerOfTen(u128),
    #[error(
        "segment of {requested} values needs {bytes} bytes, over the {budget_mib} MiB budget; \
         try a segment size of at most {suggested}"
    )]
    MemoryBudget {
        requested: u64,
        bytes: u64,
        budget_mib: u64,
        suggested: u64,
    },
    #[error("no value found up to {0}")]
    NotFound(u128),

    #[error("{0} is not a Carmichael number")]
    NotCarmichael(u128),
    #[error("{n} lies in L_{k}")]
    InLk { n: u128, k: u32 },

    #[error("prime cache: {0}")]
    Cache(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Overflow(_)
            | Error::LimitExceeded { .. }
            | Error::MemoryBudget { .. }
            | Error::NotFound(_) => 2,
            Error::NotCarmichael(_) | Error::InLk { .. } | Error::FamilyMismatch { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
