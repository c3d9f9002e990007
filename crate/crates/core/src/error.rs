use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },

    #[error("cannot embed order {from} into order {to}: {from} does not divide {to}")]
    EmbedOrder { from: u32, to: u32 },

    #[error("polynomials live in different rings")]
    RingMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("polynomial does not vanish at q = epsilon (value {0})")]
    NotDivisibleByLinear(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` is Laurent but its image is not invertible")]
    NonInvertibleImage(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("epsilon_{index} = 1 violates the standing assumption (need d_j >= 2)")]
    AssumptionViolated { index: usize },

    #[error("beta is not multiplicatively skew-symmetric at ({j}, {k})")]
    NotSkewSymmetric { j: usize, k: usize },

    #[error("parameters are not free over the center (divisibility criterion fails)")]
    NotFree,

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("elements belong to different algebras or modes")]
    ModeMismatch,

    #[error("q-deformation exponent {num}/{den} is not an integer")]
    NonIntegralQExponent { num: i64, den: i64 },

    #[error("L_{index} = {value} does not give central powers (need a multiple of {required})")]
    NonCentralPower {
        index: usize,
        value: u32,
        required: u32,
    },

    #[error("element is not recognized in the central subalgebra: {0}")]
    Recognition(String),

    #[error("coefficient does not descend to the base cyclotomic ring")]
    DescentFailure,

    #[error("divisibility assertion failed: {0}")]
    Divisibility(String),

    #[error("identity violated at j = {j}{}", .k.map(|k| format!(", k = {k}")).unwrap_or_default())]
    IdentityViolation { j: usize, k: Option<usize> },

    #[error("lifts do not commute at epsilon; an argument is not central")]
    LiftsNotCentral,

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
