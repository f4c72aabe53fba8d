use std::fmt;

use thiserror::Error;

/// Problems with a single piecewise-constant rate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("no segments")]
    Empty,
    #[error("{breaks} breakpoints but {values} values")]
    LengthMismatch { breaks: usize, values: usize },
    #[error("first breakpoint is {0}, expected 0")]
    FirstBreakNotZero(f64),
    #[error("breakpoint {index} is not strictly increasing")]
    NotIncreasing { index: usize },
    #[error("segment {segment} has invalid value {value}")]
    BadValue { segment: usize, value: f64 },
}

/// Where in a model a coefficient lives.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffLocation {
    Alpha(usize),
    Gamma(usize),
    PhiA(usize, usize),
    PhiB(usize, usize),
}

impl fmt::Display for CoeffLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffLocation::Alpha(k) => write!(f, "debtors[{k}].alpha"),
            CoeffLocation::Gamma(k) => write!(f, "debtors[{k}].gamma"),
            CoeffLocation::PhiA(i, j) => write!(f, "phiA[{i}][{j}]"),
            CoeffLocation::PhiB(i, j) => write!(f, "phiB[{i}][{j}]"),
        }
    }
}

/// One failed model invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("debtor {debtor}: p0·exp(∫α) = {value:.6} exceeds 1 − ε = {limit}")]
    CapViolation { debtor: usize, value: f64, limit: f64 },
    #[error("{location}: rate {value} on segment {segment} is not strictly positive on the horizon")]
    NonPositiveBaseline {
        location: CoeffLocation,
        segment: usize,
        value: f64,
    },
    #[error("{location}: self-impact must be zero")]
    DiagonalImpact { location: CoeffLocation },
    #[error("{location}: {source}")]
    BadBreakpoints {
        location: CoeffLocation,
        source: CoeffError,
    },
    #[error("debtor {debtor}: p0 = {value} is outside [0, 1)")]
    P0OutOfRange { debtor: usize, value: f64 },
    #[error("{what}: expected {expected} entries, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("debtor count {0} is outside 1..=20")]
    DebtorCount(usize),
    #[error("horizon {0} must be finite and positive")]
    Horizon(f64),
    #[error("epsilon_g {0} must lie in (0, 1)")]
    Epsilon(f64),
}

/// Every violated invariant of a model specification.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} model violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

/// Errors from evaluating a validated model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("debtor {debtor}: conditional default probability g = {g} is not below 1")]
    CapViolation { debtor: usize, g: f64 },
    #[error("debtor index {0} out of range")]
    DebtorOutOfRange(usize),
}

/// Errors raised by the ladder solver and the theorem estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("step control failed at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
    #[error("node {node} fell to {value:e} at t = {t}")]
    NegativeValue { node: usize, value: f64, t: f64 },
    #[error("debtor {debtor} in D is non-systemic; the probability is exactly 0")]
    InvalidD { debtor: usize },
    #[error("sets {c} and {d} must be disjoint")]
    Overlap {
        c: crate::DebtorSet,
        d: crate::DebtorSet,
    },
    #[error("grid must be nondecreasing within [0, {horizon}]")]
    BadGrid { horizon: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from the independent oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("oracle requires p0 ≡ 0 but debtor {0} is systemic")]
    SystemicDebtor(usize),
    #[error("{n} debtors exceed the oracle's cap of {cap}")]
    DimensionCap { n: usize, cap: usize },
    #[error("cap violated: g reaches {0} before t")]
    Cap(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Configuration loading errors.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("TOML parse error: {0}")]
    Toml(String),
    #[error("invalid model: {0}")]
    Invalid(#[from] ValidationError),
    #[error("{0}")]
    Other(String),
}

/// Errors from experiment orchestration and report handling.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
