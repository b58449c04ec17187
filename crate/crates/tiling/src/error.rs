use thiserror::Error;

#[derive(Debug, Error)]
pub enum TilingError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown tile `{0}`")]
    UnknownTile(String),

    #[error("duplicate tile `{0}`")]
    DuplicateTile(String),

    #[error("invalid tile token `{0}`")]
    InvalidToken(String),

    #[error("tile index {index} out of range for system with {n_tiles} tiles")]
    IndexOutOfRange { index: u32, n_tiles: usize },

    #[error("malformed grid: {0}")]
    MalformedGrid(String),

    #[error("no counter parameters exist for k={0}; smallest feasible k is 4")]
    NoCounterParams(u64),

    #[error("corner constraint sets must be nonempty")]
    EmptyCornerSet,
}
