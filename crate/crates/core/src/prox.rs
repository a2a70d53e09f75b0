//! Shrinkage (prox) operators and norm-ball projections for ℓ1/ℓ2/ℓ∞ and
//! their Schatten-norm counterparts.
//!
//! Conventions: sign(0) = 0, and entries sitting exactly on a threshold
//! shrink to zero. A radius of `f64::INFINITY` disables the ball.

use crate::error::{FalcError, Result};
use crate::linalg::matrix::norm2;
use crate::linalg::{slice_norm, svd_full, DenseMatrix, DenseVector, NormIndex};

/// Output of a ball-constrained prox: the constrained minimizer and the
/// minimizer with the ball dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkResult<T> {
    pub constrained: T,
    pub unconstrained: T,
    /// Whether an SVD was spent (matrix case only).
    pub used_svd: bool,
    /// Singular values of `constrained` when an SVD was taken.
    pub spectrum: Option<Vec<f64>>,
}

/// argmin ½‖x − y‖² + δ‖x‖_β
pub fn shrink_vec(y: &DenseVector, delta: f64, beta: NormIndex) -> DenseVector {
    DenseVector::from_vec_unchecked(shrink_slice(y.as_slice(), delta, beta))
}

/// Euclidean projection onto {‖x‖_γ ≤ ρ}.
pub fn project_ball(y: &DenseVector, gamma: NormIndex, rho: f64) -> DenseVector {
    DenseVector::from_vec_unchecked(project_slice(y.as_slice(), gamma, rho))
}

/// argmin ½‖x − y‖² + δ‖x‖_β  s.t. ‖x‖_β ≤ η
pub fn shrink_vec_ball(y: &DenseVector, delta: f64, beta: NormIndex, eta: f64) -> DenseVector {
    DenseVector::from_vec_unchecked(shrink_ball_slice(y.as_slice(), delta, beta, eta))
}

/// Matrix shrinkage on the singular values: returns
/// U diag(shrink_vec_ball(σ)) Vᵀ and U diag(shrink_vec(σ)) Vᵀ from one SVD.
/// α = 2 works on the entries directly and needs no SVD.
pub fn shrink_matrix(
    y: &DenseMatrix,
    delta: f64,
    alpha: NormIndex,
    eta: f64,
) -> Result<ShrinkResult<DenseMatrix>> {
    check_params(delta, eta)?;
    let (m, n) = y.shape();
    if alpha == NormIndex::Two {
        let unc = shrink_slice(y.as_slice(), delta, NormIndex::Two);
        let con = constrain(y.as_slice(), &unc, delta, NormIndex::Two, eta);
        return Ok(ShrinkResult {
            constrained: DenseMatrix::from_col_major_unchecked(m, n, con),
            unconstrained: DenseMatrix::from_col_major_unchecked(m, n, unc),
            used_svd: false,
            spectrum: None,
        });
    }
    let svd = svd_full(y)?;
    let sigma = svd.singular_values.as_slice();
    let d_unc = shrink_slice(sigma, delta, alpha);
    let d_con = constrain(sigma, &d_unc, delta, alpha, eta);
    let unconstrained = svd.recompose_with(&d_unc);
    let constrained = if d_con == d_unc {
        unconstrained.clone()
    } else {
        svd.recompose_with(&d_con)
    };
    Ok(ShrinkResult {
        constrained,
        unconstrained,
        used_svd: true,
        spectrum: Some(d_con),
    })
}

fn check_params(delta: f64, eta: f64) -> Result<()> {
    if !(delta >= 0.0) || delta.is_infinite() {
        return Err(FalcError::InvalidArgument(format!("shrinkage weight {delta}")));
    }
    if !(eta >= 0.0) {
        return Err(FalcError::InvalidArgument(format!("ball radius {eta}")));
    }
    Ok(())
}

#[inline]
fn soft(v: f64, t: f64) -> f64 {
    let a = v.abs() - t;
    if a > 0.0 {
        a.copysign(v)
    } else {
        0.0
    }
}

pub(crate) fn shrink_slice(y: &[f64], delta: f64, beta: NormIndex) -> Vec<f64> {
    if delta == 0.0 {
        return y.to_vec();
    }
    match beta {
        NormIndex::One => y.iter().map(|&v| soft(v, delta)).collect(),
        NormIndex::Two => {
            let nrm = norm2(y);
            if nrm <= delta {
                vec![0.0; y.len()]
            } else {
                let f = 1.0 - delta / nrm;
                y.iter().map(|v| v * f).collect()
            }
        }
        NormIndex::Inf => {
            // y − Π_{ℓ1 ball of radius δ}(y) = sign(y)·min(|y|, t)
            match l1_threshold(y, delta) {
                None => vec![0.0; y.len()],
                Some(t) => y.iter().map(|&v| v.abs().min(t).copysign(v)).collect(),
            }
        }
    }
}

pub(crate) fn project_slice(y: &[f64], gamma: NormIndex, rho: f64) -> Vec<f64> {
    if rho == f64::INFINITY {
        return y.to_vec();
    }
    if rho <= 0.0 {
        return vec![0.0; y.len()];
    }
    match gamma {
        NormIndex::Two => {
            let nrm = norm2(y);
            if nrm <= rho {
                y.to_vec()
            } else {
                let f = rho / nrm;
                y.iter().map(|v| v * f).collect()
            }
        }
        NormIndex::Inf => y.iter().map(|v| v.clamp(-rho, rho)).collect(),
        NormIndex::One => match l1_threshold(y, rho) {
            None => y.to_vec(),
            Some(t) => y.iter().map(|&v| soft(v, t)).collect(),
        },
    }
}

pub(crate) fn shrink_ball_slice(y: &[f64], delta: f64, beta: NormIndex, eta: f64) -> Vec<f64> {
    let unc = shrink_slice(y, delta, beta);
    constrain(y, &unc, delta, beta, eta)
}

/// Boundary solution when the unconstrained shrink leaves the η-ball.
fn constrain(y: &[f64], unc: &[f64], delta: f64, beta: NormIndex, eta: f64) -> Vec<f64> {
    if eta == f64::INFINITY || slice_norm(unc, beta) <= eta {
        return unc.to_vec();
    }
    if eta <= 0.0 {
        return vec![0.0; y.len()];
    }
    match beta {
        NormIndex::Two => {
            let f = eta / norm2(y);
            y.iter().map(|v| v * f).collect()
        }
        NormIndex::Inf => y.iter().map(|v| v.clamp(-eta, eta)).collect(),
        NormIndex::One => {
            // soft threshold at the shift that lands on ‖x‖₁ = η; it is ≥ δ
            // because the δ-shrink was infeasible
            let t = l1_threshold(y, eta).map_or(delta, |t| t.max(delta));
            y.iter().map(|&v| soft(v, t)).collect()
        }
    }
}

/// Shift t > 0 with Σ(|y_i| − t)₊ = r, or None when ‖y‖₁ ≤ r.
pub(crate) fn l1_threshold(y: &[f64], r: f64) -> Option<f64> {
    let total: f64 = y.iter().map(|v| v.abs()).sum();
    if total <= r {
        return None;
    }
    let mut a: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    a.sort_unstable_by(|p, q| q.total_cmp(p));
    let mut cum = 0.0;
    let mut t = 0.0;
    for (k, &ak) in a.iter().enumerate() {
        cum += ak;
        let cand = (cum - r) / (k + 1) as f64;
        if ak > cand {
            t = cand;
        } else {
            break;
        }
    }
    Some(t.max(0.0))
}
