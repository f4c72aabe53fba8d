//! Loading a [`ModelSpec`] from JSON or TOML.
//!
//! ```json
//! {
//!   "n": 2, "horizon": 1.0, "epsilon_g": 1e-6,
//!   "debtors": [
//!     {"alpha": 0.1, "gamma": {"breaks": [0, 0.5], "values": [0.5, 0.7]}, "p0": 0.2},
//!     {"alpha": 0.1, "gamma": 0.5}
//!   ],
//!   "phiA": [[0, 0.3], [0.2, 0]]
//! }
//! ```
//!
//! Constant rates may be written as plain numbers. Missing impact matrices are
//! zero and a missing `p0` is `0`.

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::coeff::PiecewiseConstant;
use super::spec::{validate_spec, Model, ModelSpec, DEFAULT_EPSILON_G};
use crate::error::{CoeffLocation, ConfigError, ValidationError, Violation};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawRate {
    Scalar(f64),
    Steps { breaks: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDebtor {
    alpha: RawRate,
    gamma: RawRate,
    #[serde(default)]
    p0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    n: usize,
    horizon: f64,
    #[serde(default = "default_epsilon")]
    epsilon_g: f64,
    debtors: Vec<RawDebtor>,
    #[serde(default, rename = "phiA")]
    phi_a: Option<Vec<Vec<RawRate>>>,
    #[serde(default, rename = "phiB")]
    phi_b: Option<Vec<Vec<RawRate>>>,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON_G
}

/// Input format of a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Json,
    Toml,
}

impl ConfigFormat {
    /// `.toml` files are TOML; everything else is treated as JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("toml") => ConfigFormat::Toml,
            _ => ConfigFormat::Json,
        }
    }
}

/// A parsed configuration together with its content identifier.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub model: Model,
    /// Git-style blob identifier of the raw bytes (SHA-256 variant).
    pub config_id: String,
}

/// `sha256("blob <len>\0" ‖ bytes)`, hex encoded.
pub fn content_id(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Parses a spec without validating it.
pub fn parse_spec(text: &str, format: ConfigFormat) -> Result<ModelSpec, ConfigError> {
    let raw: RawModel = match format {
        ConfigFormat::Json => serde_json::from_str(text).map_err(|e| ConfigError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?,
        ConfigFormat::Toml => toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string()))?,
    };
    raw.into_spec().map_err(ConfigError::Invalid)
}

/// Parses and validates a model from text.
pub fn model_from_str(text: &str, format: ConfigFormat) -> Result<Model, ConfigError> {
    Ok(validate_spec(parse_spec(text, format)?)?)
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig, ConfigError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| ConfigError::Other(format!("{} is not valid UTF-8", path.display())))?;
    let model = model_from_str(&text, ConfigFormat::from_path(path))?;
    Ok(LoadedConfig {
        model,
        config_id: content_id(&bytes),
    })
}

impl RawModel {
    fn into_spec(self) -> Result<ModelSpec, ValidationError> {
        let n = self.n;
        let mut violations = Vec::new();
        if self.debtors.len() != n {
            violations.push(Violation::DimensionMismatch {
                what: "debtors".into(),
                expected: n,
                found: self.debtors.len(),
            });
            return Err(ValidationError { violations });
        }
        let mut rate = |raw: &RawRate, loc: CoeffLocation| -> PiecewiseConstant {
            let built = match raw {
                RawRate::Scalar(v) => PiecewiseConstant::new(vec![0.0], vec![*v]),
                RawRate::Steps { breaks, values } => {
                    PiecewiseConstant::new(breaks.clone(), values.clone())
                }
            };
            built.unwrap_or_else(|source| {
                violations.push(Violation::BadBreakpoints {
                    location: loc,
                    source,
                });
                PiecewiseConstant::zero()
            })
        };
        let mut alpha = Vec::with_capacity(n);
        let mut gamma = Vec::with_capacity(n);
        let mut p0 = Vec::with_capacity(n);
        for (k, d) in self.debtors.iter().enumerate() {
            alpha.push(rate(&d.alpha, CoeffLocation::Alpha(k)));
            gamma.push(rate(&d.gamma, CoeffLocation::Gamma(k)));
            p0.push(d.p0);
        }
        let mut matrix = |raw: &Option<Vec<Vec<RawRate>>>,
                          loc: fn(usize, usize) -> CoeffLocation|
         -> Vec<Vec<PiecewiseConstant>> {
            match raw {
                None => vec![vec![PiecewiseConstant::zero(); n]; n],
                Some(rows) => rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, r)| rate(r, loc(i, j)))
                            .collect()
                    })
                    .collect(),
            }
        };
        let phi_a = matrix(&self.phi_a, CoeffLocation::PhiA);
        let phi_b = matrix(&self.phi_b, CoeffLocation::PhiB);
        if !violations.is_empty() {
            return Err(ValidationError { violations });
        }
        Ok(ModelSpec {
            n,
            horizon: self.horizon,
            epsilon_g: self.epsilon_g,
            alpha,
            gamma,
            p0,
            phi_a,
            phi_b,
        })
    }
}

/// SHA-256 of the canonical JSON serialization of a validated model.
pub fn model_hash(model: &Model) -> String {
    let json = serde_json::to_vec(model.spec()).expect("model spec serializes");
    hex::encode(Sha256::digest(&json))
}
