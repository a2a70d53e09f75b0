use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, DenseVector};
use super::svd::svd_full;
use crate::error::{FalcError, Result};

/// Index of an ℓp norm, p ∈ {1, 2, ∞}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormIndex {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl NormIndex {
    /// Hölder conjugate.
    pub fn dual(self) -> Self {
        match self {
            NormIndex::One => NormIndex::Inf,
            NormIndex::Two => NormIndex::Two,
            NormIndex::Inf => NormIndex::One,
        }
    }
}

impl fmt::Display for NormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormIndex::One => "1",
            NormIndex::Two => "2",
            NormIndex::Inf => "inf",
        })
    }
}

impl FromStr for NormIndex {
    type Err = FalcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "one" | "l1" => Ok(NormIndex::One),
            "2" | "two" | "l2" => Ok(NormIndex::Two),
            "inf" | "infinity" | "linf" => Ok(NormIndex::Inf),
            other => Err(FalcError::InvalidArgument(format!("unknown norm index {other:?}"))),
        }
    }
}

pub fn slice_norm(v: &[f64], p: NormIndex) -> f64 {
    match p {
        NormIndex::One => v.iter().map(|x| x.abs()).sum(),
        NormIndex::Two => super::matrix::norm2(v),
        NormIndex::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

pub fn vec_norm(v: &DenseVector, p: NormIndex) -> f64 {
    slice_norm(v.as_slice(), p)
}

/// ‖σ(x)‖_α. The Frobenius case skips the SVD.
pub fn schatten_norm(x: &DenseMatrix, alpha: NormIndex) -> Result<f64> {
    match alpha {
        NormIndex::Two => Ok(x.frobenius_norm()),
        _ => {
            let svd = svd_full(x)?;
            Ok(vec_norm(&svd.singular_values, alpha))
        }
    }
}

/// I(α) = √min(m, n) for α = ∞, 1 otherwise.
pub fn norm_factor_i(alpha: NormIndex, m: usize, n: usize) -> f64 {
    match alpha {
        NormIndex::Inf => (m.min(n) as f64).sqrt(),
        _ => 1.0,
    }
}

/// J(β) = √p for β = ∞, 1 otherwise.
pub fn norm_factor_j(beta: NormIndex, p: usize) -> f64 {
    match beta {
        NormIndex::Inf => (p as f64).sqrt(),
        _ => 1.0,
    }
}
