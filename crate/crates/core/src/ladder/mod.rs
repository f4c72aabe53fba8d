//! The `(S, D)` ladder: construction, pathwise integration and the
//! estimators built on it.

mod dp54;
mod estimators;
mod integrate;
mod lattice;
mod lpath;

pub use dp54::{Dp54, StepControl};
pub use estimators::{
    joint_b_default_via_theorem, joint_b_default_via_theorem_with, ladder_estimates,
    survival_via_theorem, survival_via_theorem_with, LadderQuery,
};
pub use integrate::{
    drift_terms, integrate_ladder, ladder_dump, DriftForm, DriftTerms, LadderDump, LadderValues,
    NodeDump, SolverOptions,
};
pub use lattice::{build_ladder, count_equations, Edge, Ladder, LadderNode};
pub use lpath::l_pathwise;
