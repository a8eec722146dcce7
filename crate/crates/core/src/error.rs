use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: String,
        domain: &'static str,
    },
    #[error("depth {requested} exceeds the configured cap {cap}")]
    DepthCap { requested: u64, cap: u64 },
    #[error("Möbius map has a pole at {0}")]
    Pole(String),
    #[error("coefficients ({a}, {b}, {c}, {d}) do not have |det| = 1")]
    NotUnimodular {
        a: String,
        b: String,
        c: String,
        d: String,
    },
    #[error("invalid continued-fraction word: {0}")]
    InvalidWord(String),
    #[error("continued-fraction word {0} is not canonical (last digit must be >= 2)")]
    NonCanonical(String),
    #[error("continued-fraction digit does not fit in 64 bits")]
    DigitOverflow,
    #[error("measure has total mass {0}, expected 1")]
    NotNormalized(f64),
    #[error("cannot parse {input:?} as a rational: {reason}")]
    Parse { input: String, reason: &'static str },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: String, hi: String },
    #[error("epsilon {0} is too large: the neighbourhood leaves (0,1)")]
    EpsilonTooLarge(String),
    #[error("{0} has no exact rational value")]
    NotExact(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("atoms must be sorted, unique and carry nonnegative weights")]
    InvalidAtoms,
}
