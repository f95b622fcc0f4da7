//! JSON experiment configs. Every document carries `"schema": 1`; the rest
//! is the body of one subcommand.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bifunction::{Bifunction, DomainK};
use crate::geometry::{Point, Space};

pub const SCHEMA_VERSION: u64 = 1;

/// A parsed config together with the hash of its source text.
pub struct Loaded<T> {
    pub body: T,
    pub hash: String,
}

pub fn hash_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Parses `text` (named `origin` in messages). Syntax errors report line and
/// column; type errors report the path of the offending field.
pub fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<Loaded<T>, String> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("{origin}:{}:{}: {e}", e.line(), e.column()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| format!("{origin}: config must be a JSON object"))?;
    match obj.remove("schema") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(format!("{origin}: field `schema`: unsupported version {v}, expected {SCHEMA_VERSION}")),
        None => return Err(format!("{origin}: missing field `schema`")),
    }
    let body = serde_path_to_error::deserialize(value)
        .map_err(|e| format!("{origin}: field `{}`: {}", e.path(), e.inner()))?;
    Ok(Loaded {
        body,
        hash: hash_text(text),
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text, &path.display().to_string())
}

fn whole_space() -> DomainK {
    DomainK::WholeSpace
}
fn default_inner_tol() -> f64 {
    1e-6
}
fn default_inner_max_iters() -> usize {
    20_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventConfig {
    pub space: Space,
    pub bifunction: Bifunction,
    #[serde(default = "whole_space")]
    pub domain: DomainK,
    pub x: Point,
    pub lambda: f64,
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    #[serde(default = "default_inner_max_iters")]
    pub inner_max_iters: usize,
    /// Skip the closed-form registry.
    #[serde(default)]
    pub generic_only: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_check_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub space: Space,
    #[serde(default = "default_check_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_kkm_samples() -> usize {
    1000
}
fn default_resolution() -> usize {
    crate::kkm::DEFAULT_RESOLUTION
}
fn default_pairs() -> usize {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KkmConfig {
    pub space: Space,
    pub bifunction: Bifunction,
    pub points: Vec<Point>,
    /// 0-based index sets; all nonempty subsets when absent.
    #[serde(default)]
    pub subsets: Option<Vec<Vec<usize>>>,
    #[serde(default = "default_kkm_samples")]
    pub samples: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_pairs")]
    pub lipschitz_pairs: usize,
    #[serde(default = "default_pairs")]
    pub diameter_samples: usize,
    #[serde(default)]
    pub seed: u64,
}
