//! Witness construction and exact verification for compiled implication
//! instances: factored distributions, certificate based statement checking,
//! torus labelings, extension deciders, and numeric counterexample search.

pub mod error;
pub mod labeling;
pub mod master;
pub mod realize;
pub mod structured;
pub mod verify;

pub use error::WitnessError;
pub use labeling::TorusLabeling;
pub use master::{tiling_to_counterexample, WitnessBundle};
pub use realize::{realize, realize_onto};
pub use structured::{Def, DepSet, Law, StructuredDistribution};
pub use verify::{verify_instance, verify_statements, Method, VerificationReport, Verdict};
