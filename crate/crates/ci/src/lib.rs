//! Exact conditional-independence core: joint distributions with rational
//! masses, CI statements over bounded variables, implication instances, and
//! their canonical text and JSON encodings.

pub mod distribution;
pub mod error;
pub mod format;
pub mod statement;

pub use distribution::{rat_to_f64, DistributionBuilder, JointDistribution};
pub use error::CiError;
pub use statement::{
    evaluate_implication, Bound, BoundKind, BoundViolation, CIStatement, EvaluationReport,
    ImplicationInstance, ImplicationOutcome, VarSet, VariableSpec,
};
