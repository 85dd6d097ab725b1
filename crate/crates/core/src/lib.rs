//! A pseudo-Boolean CDCL solver whose conflict analysis is parameterized by a
//! cutting-planes weakening strategy.

pub mod analysis;
pub mod assignment;
pub mod bench;
pub mod constraint;
pub mod generate;
pub mod int;
pub mod lit;
pub mod opb;
pub mod propagation;
pub mod rules;
pub mod sample;
pub mod semantic;
pub mod solver;
pub mod trace;

pub use analysis::{Preserve, Side, Strategy};
pub use assignment::{Assignment, PartialAssignment};
pub use constraint::{normalize, Constraint, Normalized, Relation};
pub use int::Int;
pub use lit::{Literal, Var};
