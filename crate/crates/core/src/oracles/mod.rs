//! Independent reference values: the single-name closed form, the Markov
//! chain of the non-systemic case, and its subset ODE.

mod case2;
mod markov;
mod single;

pub use case2::{case2_ode_survival, CASE2_MAX_FREE};
pub use markov::{
    markov_distribution, markov_generator, markov_joint_survival, GeneratorMatrix,
    MARKOV_MAX_DEBTORS,
};
pub use single::single_name_survival_oracle;
