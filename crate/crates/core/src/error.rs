use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic {p} must exceed the form degree {d}")]
    CharTooSmall { p: u64, d: u32 },
    #[error("field of order {p}^{t} exceeds the table bound 2^20")]
    TooLarge { p: u64, t: u32 },
    #[error("zero has no power class")]
    ZeroElement,
    #[error("element {0} is outside the field")]
    NotAnElement(u64),
    #[error("group ring elements live over different groups")]
    GroupMismatch,
    #[error("forms live over different power-class contexts")]
    CtxMismatch,
    #[error("degree {0} < 3: diagonal forms are not classified by their coefficient classes")]
    DegreeTooSmall(u32),
    #[error("diagonal coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("operation expects a Witt class of kind {expected}, got {found}")]
    KindMismatch { expected: String, found: String },
    #[error("the permanent does not descend to this Witt ring")]
    NotInvariant,
    #[error("operation needs a concrete field; the context is abstract")]
    AbstractMode,
    #[error("exhaustive search over {0} vectors exceeds the budget")]
    SearchTooLarge(u128),
    #[error("filtration depth {0} exceeds 4")]
    TooDeep(usize),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown equivalence kind `{0}`")]
    UnknownKind(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("class index {0} out of range")]
    ClassOutOfRange(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}
