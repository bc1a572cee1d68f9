//! The JSON function format and instance loading.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::corpus;
use crate::error::{Error, Result};
use crate::polyfun::{AffinePiece, PolyhedralFunction};

/// `f(x) = max_i <a_i, x> - b_i` as read from and written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub dim: usize,
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub a: Vec<f64>,
    pub b: f64,
}

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_function(&self) -> Result<PolyhedralFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece::new(p.a.clone(), p.b))
            .collect();
        PolyhedralFunction::new(self.dim, pieces).map_err(|e| match e {
            Error::Dimension { .. } | Error::InvalidInput(_) => Error::Parse(e.to_string()),
            other => other,
        })
    }

    pub fn from_function(f: &PolyhedralFunction, name: Option<String>) -> Self {
        FunctionSpec {
            name,
            note: None,
            dim: f.dim(),
            pieces: f
                .pieces()
                .iter()
                .map(|p| PieceSpec {
                    a: p.gradient.clone(),
                    b: p.offset,
                })
                .collect(),
        }
    }
}

/// Reads a spec file. A path that does not exist but whose file stem names a
/// built-in instance (`examples/e13`, `e13.json`) loads that instance instead.
pub fn load(path: &str) -> Result<FunctionSpec> {
    let p = Path::new(path);
    if p.exists() {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
        return FunctionSpec::parse(&text);
    }
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(path);
    match corpus::lookup(stem) {
        Some(text) => FunctionSpec::parse(text),
        None => Err(Error::Parse(format!(
            "{path}: no such file and no built-in instance named {stem:?}"
        ))),
    }
}
