use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{FalcError, Result};
use crate::linalg::{DenseVector, LinearMap, NormIndex, StackedRow};

/// One linear constraint `L(X) + s + y = r`.
///
/// `s` is present when `beta_slack` is set and is penalized by μ2‖·‖_β; `y`
/// is present when `gamma_slack` is set and is confined to the ρ-ball in
/// the γ-norm. A block with neither is a pure equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintBlock {
    pub map: LinearMap,
    pub rhs: DenseVector,
    #[serde(default)]
    pub beta_slack: bool,
    #[serde(default)]
    pub gamma_slack: bool,
    /// Lagrange multiplier θ; same length as `rhs`.
    pub multiplier: DenseVector,
}

impl ConstraintBlock {
    pub fn new(map: LinearMap, rhs: DenseVector, beta_slack: bool, gamma_slack: bool) -> Self {
        let multiplier = DenseVector::zeros(rhs.len());
        Self {
            map,
            rhs,
            beta_slack,
            gamma_slack,
            multiplier,
        }
    }

    pub fn with_multiplier(mut self, theta: DenseVector) -> Self {
        self.multiplier = theta;
        self
    }

    pub fn is_equality(&self) -> bool {
        !self.beta_slack && !self.gamma_slack
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

/// min μ1‖σ(X)‖_α + μ2‖s‖_β  s.t.  L_i(X) + s_i + y_i = r_i,  ‖y‖_γ ≤ ρ
///
/// where s and y stack the slacks of the blocks that carry them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: usize,
    pub n: usize,
    pub alpha: NormIndex,
    pub beta: NormIndex,
    pub gamma: NormIndex,
    pub mu1: f64,
    pub mu2: f64,
    pub rho: f64,
    pub blocks: Vec<ConstraintBlock>,
    #[serde(default)]
    pub label: String,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FalcError::InvalidSpec(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!("empty variable shape {}x{}", self.m, self.n));
        }
        for (name, v) in [("mu1", self.mu1), ("mu2", self.mu2), ("rho", self.rho)] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if self.mu1 == 0.0 && self.mu2 == 0.0 {
            return bad("mu1 and mu2 are both zero".into());
        }
        if self.blocks.is_empty() {
            return bad("no constraint blocks".into());
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.map.in_shape() != (self.m, self.n) {
                return bad(format!(
                    "block {i}: operator input {:?} does not match {}x{}",
                    b.map.in_shape(),
                    self.m,
                    self.n
                ));
            }
            if b.map.out_dim() != b.rhs.len() {
                return bad(format!(
                    "block {i}: operator output {} does not match rhs length {}",
                    b.map.out_dim(),
                    b.rhs.len()
                ));
            }
            if b.multiplier.len() != b.rhs.len() {
                return bad(format!(
                    "block {i}: multiplier length {} does not match rhs length {}",
                    b.multiplier.len(),
                    b.rhs.len()
                ));
            }
            if !b.rhs.is_finite() || !b.multiplier.is_finite() {
                return Err(FalcError::NonFinite(format!("block {i} data")));
            }
        }
        if self.blocks.iter().all(|b| b.dim() == 0) {
            return bad("all constraint blocks are empty".into());
        }
        Ok(())
    }

    pub fn layout(&self) -> SlackLayout {
        SlackLayout::new(&self.blocks)
    }

    pub fn stacked_rows(&self) -> Vec<StackedRow<'_>> {
        self.blocks
            .iter()
            .map(|b| StackedRow {
                map: &b.map,
                beta_slack: b.beta_slack,
                gamma_slack: b.gamma_slack,
            })
            .collect()
    }
}

/// Where each block's slacks live inside the stacked s and y vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackLayout {
    pub s_ranges: Vec<Option<Range<usize>>>,
    pub y_ranges: Vec<Option<Range<usize>>>,
    pub s_len: usize,
    pub y_len: usize,
}

impl SlackLayout {
    pub fn new(blocks: &[ConstraintBlock]) -> Self {
        let mut s_ranges = Vec::with_capacity(blocks.len());
        let mut y_ranges = Vec::with_capacity(blocks.len());
        let (mut s_len, mut y_len) = (0, 0);
        for b in blocks {
            let q = b.dim();
            s_ranges.push(b.beta_slack.then(|| {
                s_len += q;
                s_len - q..s_len
            }));
            y_ranges.push(b.gamma_slack.then(|| {
                y_len += q;
                y_len - q..y_len
            }));
        }
        Self {
            s_ranges,
            y_ranges,
            s_len,
            y_len,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(q: usize, bs: bool, gs: bool) -> ConstraintBlock {
        ConstraintBlock::new(
            LinearMap::Dense {
                in_shape: (2, 1),
                matrix: crate::linalg::DenseMatrix::zeros(q, 2),
            },
            DenseVector::zeros(q),
            bs,
            gs,
        )
    }

    fn spec(blocks: Vec<ConstraintBlock>) -> ProblemSpec {
        ProblemSpec {
            m: 2,
            n: 1,
            alpha: NormIndex::One,
            beta: NormIndex::One,
            gamma: NormIndex::Two,
            mu1: 1.0,
            mu2: 1.0,
            rho: 0.0,
            blocks,
            label: String::new(),
        }
    }

    #[test]
    fn layout_offsets() {
        let l = SlackLayout::new(&[block(3, true, false), block(2, true, true), block(4, false, true)]);
        assert_eq!(l.s_ranges, vec![Some(0..3), Some(3..5), None]);
        assert_eq!(l.y_ranges, vec![None, Some(0..2), Some(2..6)]);
        assert_eq!((l.s_len, l.y_len), (5, 6));
    }

    #[test]
    fn validation() {
        assert!(spec(vec![block(2, true, false)]).validate().is_ok());
        assert!(spec(vec![]).validate().is_err());
        let mut s = spec(vec![block(2, true, false)]);
        s.rho = -1.0;
        assert!(s.validate().is_err());
        let mut s = spec(vec![block(2, true, false)]);
        s.mu1 = 0.0;
        s.mu2 = 0.0;
        assert!(s.validate().is_err());
        let mut s = spec(vec![block(2, true, false)]);
        s.m = 3;
        assert!(s.validate().is_err());
        let mut s = spec(vec![block(2, true, false)]);
        s.blocks[0].rhs = DenseVector::zeros(3);
        assert!(s.validate().is_err());
    }
}
