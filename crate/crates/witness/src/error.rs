use ciwb_ci::CiError;
use ciwb_predicates::PredicateError;
use ciwb_tiling::TilingError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Ci(#[from] CiError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("backbone atom masses must be positive and sum to one")]
    BadAtomMasses,
    #[error("atom mass numerators over the common denominator exceed u64")]
    MassOverflow,
    #[error("definition of variable {var} is invalid: {reason}")]
    InvalidDef { var: usize, reason: String },
    #[error("statement {index} cannot be decided: {reason}")]
    Undecided { index: usize, reason: String },
    #[error("enumeration needs {states} states, over the cap of {cap}")]
    EnumerationTooBig { states: u128, cap: u64 },
    #[error("joint value space too large to key exactly")]
    KeyOverflow,
    #[error("law of {0} is not computable in factored form")]
    LawUnavailable(String),
    #[error("uniform split gadget infeasible: {0}")]
    GadgetInfeasible(String),
    #[error("flip block over ({0}, {1}, {2}) realizes a pattern outside the canonical four")]
    FlipShape(usize, usize, usize),
    #[error("cycle length {0} is odd; the edge two-coloring needs even cycles")]
    OddCycle(u64),
    #[error("cycle length {0} collapses onto a single support pair; lengths must be at least 4")]
    ShortCycle(u64),
    #[error("bit {0} of the switch marginal is not fair")]
    UnbalancedBits(usize),
    #[error("no torus of even width at least 4 fits the bound {max}")]
    TorusTooSmall { max: u64 },
    #[error("designated tile {0} does not occur in the tiling")]
    TileUnused(usize),
    #[error("the grid is not a valid periodic tiling of the system")]
    InvalidTiling,
    #[error("grid size {got} exceeds the instance bound {max}")]
    GridTooLarge { got: u64, max: u64 },
    #[error("no realization hook for custom role {0}")]
    UnknownRole(String),
    #[error("search space of {0} cells exceeds the limit")]
    SearchTooLarge(u128),
    #[error("size expression does not divide exactly")]
    SizeNotExact,
}
