use serde::{Deserialize, Serialize};

use crate::error::{FalcError, Result};
use crate::linalg::{schatten_norm, slice_norm, DenseMatrix, DenseVector};
use crate::prox::project_slice;

use super::spec::ProblemSpec;

/// One multiplier per constraint block.
///
/// Dual problem:
///
/// ```text
/// max  Σ r_iᵀu_i − ρ‖u_γ‖_{γ*}
/// s.t. ‖σ(Σ L_i*(u_i))‖_{α*} ≤ μ1,   ‖u_β‖_{β*} ≤ μ2
/// ```
///
/// where u_β and u_γ stack the multipliers of blocks carrying a β- or
/// γ-slack, and blocks without a β-slack leave u_i unconstrained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub blocks: Vec<DenseVector>,
}

const FEAS_SLACK: f64 = 1e-10;

impl DualPoint {
    pub fn zeros(spec: &ProblemSpec) -> Self {
        Self {
            blocks: spec.blocks.iter().map(|b| DenseVector::zeros(b.dim())).collect(),
        }
    }

    fn check(&self, spec: &ProblemSpec) -> Result<()> {
        if self.blocks.len() != spec.blocks.len()
            || self.blocks.iter().zip(&spec.blocks).any(|(u, b)| u.len() != b.dim())
        {
            return Err(FalcError::Shape("dual point does not match the constraint blocks".into()));
        }
        Ok(())
    }

    fn stacked(&self, pick: impl Fn(usize) -> bool) -> Vec<f64> {
        let mut out = Vec::new();
        for (i, u) in self.blocks.iter().enumerate() {
            if pick(i) {
                out.extend_from_slice(u.as_slice());
            }
        }
        out
    }

    /// Σ L_i*(u_i)
    pub fn adjoint_sum(&self, spec: &ProblemSpec) -> Result<DenseMatrix> {
        self.check(spec)?;
        let mut out = vec![0.0; spec.m * spec.n];
        for (b, u) in spec.blocks.iter().zip(&self.blocks) {
            b.map.adjoint_add(u.as_slice(), 1.0, &mut out);
        }
        DenseMatrix::from_col_major(spec.m, spec.n, out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualFeasibility {
    /// ‖σ(Σ L_i*(u_i))‖_{α*}
    pub matrix_norm: f64,
    /// ‖u_β‖_{β*}
    pub slack_norm: f64,
    pub feasible: bool,
}

pub fn dual_objective(spec: &ProblemSpec, pt: &DualPoint) -> Result<f64> {
    pt.check(spec)?;
    let lin: f64 = spec.blocks.iter().zip(&pt.blocks).map(|(b, u)| b.rhs.dot(u)).sum();
    let ug = pt.stacked(|i| spec.blocks[i].gamma_slack);
    Ok(lin - spec.rho * slice_norm(&ug, spec.gamma.dual()))
}

pub fn dual_feasibility(spec: &ProblemSpec, pt: &DualPoint) -> Result<DualFeasibility> {
    let g = pt.adjoint_sum(spec)?;
    let matrix_norm = schatten_norm(&g, spec.alpha.dual())?;
    let ub = pt.stacked(|i| spec.blocks[i].beta_slack);
    let slack_norm = slice_norm(&ub, spec.beta.dual());
    Ok(DualFeasibility {
        matrix_norm,
        slack_norm,
        feasible: matrix_norm <= spec.mu1 + FEAS_SLACK && slack_norm <= spec.mu2 + FEAS_SLACK,
    })
}

pub fn dual_feasible(spec: &ProblemSpec, pt: &DualPoint) -> Result<bool> {
    Ok(dual_feasibility(spec, pt)?.feasible)
}

/// Scales `pt` down just enough to satisfy both dual norm constraints.
/// Fails when a constraint with zero weight is violated, since no scaling
/// short of zero can repair it.
pub fn scale_to_feasible(spec: &ProblemSpec, pt: &DualPoint) -> Result<DualPoint> {
    let f = dual_feasibility(spec, pt)?;
    let mut factor = 1.0f64;
    for (norm, mu) in [(f.matrix_norm, spec.mu1), (f.slack_norm, spec.mu2)] {
        if norm > mu {
            if mu == 0.0 {
                if norm > FEAS_SLACK {
                    return Err(FalcError::InvalidArgument(
                        "dual constraint with zero weight is violated".into(),
                    ));
                }
                continue;
            }
            factor = factor.min(mu / norm);
        }
    }
    Ok(DualPoint {
        blocks: pt.blocks.iter().map(|u| u.scaled(factor)).collect(),
    })
}

/// Dual candidate from a multiplier estimate: the β-blocks are projected
/// onto the μ2-ball of the β* norm, then the point is scaled for the
/// matrix constraint.
pub fn project_to_feasible(spec: &ProblemSpec, pt: &DualPoint) -> Result<DualPoint> {
    pt.check(spec)?;
    let ub = pt.stacked(|i| spec.blocks[i].beta_slack);
    let projected = project_slice(&ub, spec.beta.dual(), spec.mu2);
    let mut off = 0;
    let blocks = pt
        .blocks
        .iter()
        .zip(&spec.blocks)
        .map(|(u, b)| {
            if !b.beta_slack {
                return u.clone();
            }
            let part = projected[off..off + u.len()].to_vec();
            off += u.len();
            DenseVector::from_vec_unchecked(part)
        })
        .collect();
    scale_to_feasible(spec, &DualPoint { blocks })
}
