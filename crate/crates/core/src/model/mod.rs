//! Model parameterization, validation and deterministic coefficients.

mod coeff;
pub mod config;
mod debtors;
mod spec;

pub use coeff::PiecewiseConstant;
pub use debtors::{DebtorSet, Members, ParseDebtorSetError, Subsets, MAX_DEBTORS};
pub use spec::{validate_spec, Model, ModelSpec, DEFAULT_EPSILON_G};
pub(crate) use spec::exp_growth_integral;
