use thiserror::Error;

#[derive(Debug, Error)]
pub enum CiError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("invalid variable name `{0}`")]
    InvalidName(String),

    #[error("atom has {got} values, distribution has {want} variables")]
    BadArity { got: usize, want: usize },

    #[error("atom mass must be positive, got {0}")]
    NonPositiveMass(String),

    #[error("distribution masses sum to {0}, expected 1")]
    BadTotalMass(String),

    #[error("distribution has no atoms")]
    EmptyDistribution,

    #[error("instance has no consequent")]
    MissingConsequent,

    #[error("instance has more than one consequent")]
    DuplicateConsequent,

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
