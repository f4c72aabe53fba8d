//! Simulation and ladder-solver engine for default systems with direct and
//! overspilling contagion.

pub mod error;
pub mod harness;
pub mod ladder;
pub mod model;
pub mod oracles;
pub mod sim;
pub mod stats;

pub use error::{ConfigError, HarnessError, ModelError, OracleError, SolverError, ValidationError, Violation};
pub use model::{validate_spec, DebtorSet, Model, ModelSpec, PiecewiseConstant};
pub use stats::{compare_estimates, ComparisonVerdict, EstimateCI};

// Compiles and runs the guide's code blocks as doctests.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub struct $name;
        };
    }
    chapter!(Introduction, "introduction.md");
    chapter!(Model, "model.md");
    chapter!(Simulation, "simulation.md");
    chapter!(Ladder, "ladder.md");
    chapter!(Oracles, "oracles.md");
    chapter!(Harness, "harness.md");
}
