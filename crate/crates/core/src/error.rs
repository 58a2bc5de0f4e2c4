use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported Lie type `{0}`")]
    UnsupportedType(String),
    #[error("`{0}` is not a reduced expression of the longest Weyl element")]
    NotLongestWord(String),
    #[error("operands live on different variable spaces")]
    SpaceMismatch,
    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),
    #[error("leg mismatch: {0}")]
    LegMismatch(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("generator `{0}` is not in standard bracket form")]
    NotStandardForm(String),
    #[error("roots {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("singular matrix in linear move")]
    SingularMatrix,
    #[error("cannot rewrite monomial {monomial} with commutation exponent n = {n}")]
    NonRewritable { monomial: String, n: String },
    #[error("move {position} ({name}): {source}")]
    ScriptFailed {
        position: usize,
        name: String,
        source: Box<Error>,
    },
    #[error("Q-shift of `{0}` by a non-integral exponent multiple")]
    NonIntegralQShift(String),
    #[error("coefficient not divisible by {0}")]
    NotDivisible(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("parse error at byte {pos} in `{input}`: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },
    #[error("argument `{0}` does not reduce to a single exponential")]
    NonMonomialArgument(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("input {0} is a pole of G_b")]
    PoleInput(String),
    #[error("accuracy target not reached: {0}")]
    AccuracyNotReached(String),
    #[error("convergence condition violated: {0}")]
    ConvergenceViolation(String),
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
