//! File formats: matrix JSON (`{"r": .., "data": [[..], ..]}`, via serde on
//! [`SymMatrix`]), sample dumps, and number formatting shared by the CSV
//! writers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contfrac::CfSequence;
use crate::error::Result;
use crate::jordan::SymMatrix;

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e6)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn read_sequence(path: &Path) -> Result<CfSequence> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: &Path) -> Result<SymMatrix> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub dist: String,
    pub p: f64,
    pub q: Option<f64>,
    pub r: usize,
    pub seed: u64,
    pub n: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleDump {
    pub header: SampleHeader,
    pub samples: Vec<SymMatrix>,
}
