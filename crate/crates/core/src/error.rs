use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {alpha} out of range for {family} (admissible: {range})")]
    ParameterOutOfRange {
        family: &'static str,
        alpha: f64,
        range: &'static str,
    },
    #[error("{family} takes no parameter, got {alpha}")]
    UnexpectedParameter { family: &'static str, alpha: f64 },
    #[error("{family} requires a parameter ({range})")]
    MissingParameter {
        family: &'static str,
        range: &'static str,
    },
    #[error("value {0} is outside [0,1]")]
    OutOfUnitInterval(f64),
    #[error("non-finite value produced by {operator} at ({x}, {y})")]
    NonFinite { operator: String, x: f64, y: f64 },
    #[error("0 and 1 combine to {0}, which is neither 0 nor 1: not a uninorm")]
    NotAUninorm(f64),
    #[error("invalid negation: {0}")]
    InvalidNegation(String),
    #[error("negation is not strong")]
    NotStrong,
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("pseudo-inverse argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("invalid ordinal sum: {0}")]
    InvalidOrdinalSum(String),
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("grid resolution must be at least 2, got {0}")]
    InvalidGrid(usize),
    #[error("cannot aggregate an empty sequence")]
    EmptySequence,
    #[error("inputs must be sorted nondecreasing: {0}")]
    Unsorted(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sequence length {n} outside supported range {min}..={max}")]
    LengthOutOfRange { n: usize, min: usize, max: usize },
    #[error("sequence length {n} is below the minimum {min}")]
    TooShort { n: usize, min: usize },
    #[error("sequence length must be even, got {0}")]
    OddLength(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown operator family `{0}`")]
    UnknownFamily(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
