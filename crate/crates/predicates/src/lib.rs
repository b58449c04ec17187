//! Compiles bounded tiling instances into conditional-independence
//! implication instances, and rewrites such instances into all-binary or
//! all-disjoint form.
//!
//! The compiler works as a sequence of predicate emissions into a
//! [`build::PredicateBuild`]: each predicate (uniformity, cycle structure,
//! torus pairing, flip extension, coloring, satisfaction gadgets) appends
//! antecedent statements and auxiliary variables, together with a witness
//! plan for every auxiliary so that a distribution certifying the
//! antecedent can be reconstructed later. [`ttori::ttori_prime`] assembles
//! the full torus instance for a tile system, [`finalize`] attaches the
//! designated-tile consequent, and [`split`] / [`disjoint`] are the two
//! post-transforms.

pub mod build;
pub mod disjoint;
pub mod emit;
pub mod error;
pub mod finalize;
pub mod labels;
pub mod pq;
pub mod split;
pub mod ttori;

pub use build::{CustomSpec, DefPlan, PredicateBuild, SizeExpr, VarId};
pub use disjoint::{
    diagonal_embed, disjointness_violations, statement_blocks_disjoint, to_disjoint,
    DisjointMapping,
};
pub use emit::SatKind;
pub use error::PredicateError;
pub use finalize::{finalize_implication, TilingImplication};
pub use labels::LabelScheme;
pub use pq::choose_pq;
pub use split::{split_binary, bits_needed, SplitInstance};
pub use ttori::{ttori_prime, TtoriRoles};
