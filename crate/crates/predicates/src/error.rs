use thiserror::Error;

/// Errors raised while assembling predicate emissions or rewriting instances.
#[derive(Debug, Error)]
pub enum PredicateError {
    #[error("uniformity predicate needs k >= {min}, got {k}")]
    KTooSmall { k: u64, min: u64 },

    #[error("variable {0} is used before it is declared")]
    UndeclaredVariable(usize),

    #[error("tile index {tile} out of range for a system with {n_tiles} tiles")]
    UnknownTile { tile: usize, n_tiles: usize },

    #[error("operation needs a finite bound on variable {0}")]
    UnboundedVariable(String),

    #[error("bound on variable {0} exceeds the range this transform supports")]
    BoundTooLarge(String),

    #[error("empty tuple argument for {0}")]
    EmptyTuple(&'static str),
}
