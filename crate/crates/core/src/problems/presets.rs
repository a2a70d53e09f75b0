use crate::error::{FalcError, Result};
use crate::linalg::{svd_truncated, DenseMatrix, DenseVector, LinearMap, NormIndex};

use super::spec::{ConstraintBlock, ProblemSpec};

/// min ‖X‖_* + μ2‖vec(S)‖₁  s.t.  X + S = D
///
/// The multiplier starts at sign(D)/max(‖sign D‖₂, ‖vec sign D‖∞/μ2).
pub fn robust_pca(d: &DenseMatrix, mu2: f64) -> Result<ProblemSpec> {
    pcp(d, mu2, 0.0, false)
}

/// min ‖X‖_* + μ2‖vec(S)‖₁  s.t.  ‖vec(X + S − D)‖∞ ≤ ρ
///
/// With ρ = 0 the noise slack is dropped, which gives the robust PCA spec
/// (only the label differs).
pub fn stable_pcp(d: &DenseMatrix, mu2: f64, rho: f64) -> Result<ProblemSpec> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(FalcError::InvalidArgument(format!("rho must be finite and nonnegative, got {rho}")));
    }
    pcp(d, mu2, rho, rho > 0.0)
        .map(|spec| ProblemSpec { label: "stable_pcp".into(), ..spec })
}

fn pcp(d: &DenseMatrix, mu2: f64, rho: f64, noisy: bool) -> Result<ProblemSpec> {
    if !(mu2 > 0.0) || !mu2.is_finite() {
        return Err(FalcError::InvalidArgument(format!("mu2 must be positive, got {mu2}")));
    }
    if !d.is_finite() {
        return Err(FalcError::NonFinite("data matrix".into()));
    }
    let (m, n) = d.shape();
    let block = ConstraintBlock::new(LinearMap::vectorize(m, n), d.vec(), true, noisy)
        .with_multiplier(initial_multiplier(d, mu2)?);
    Ok(ProblemSpec {
        m,
        n,
        alpha: NormIndex::One,
        beta: NormIndex::One,
        gamma: NormIndex::Inf,
        mu1: 1.0,
        mu2,
        rho,
        blocks: vec![block],
        label: "robust_pca".into(),
    })
}

fn initial_multiplier(d: &DenseMatrix, mu2: f64) -> Result<DenseVector> {
    let (m, n) = d.shape();
    let sign: Vec<f64> = d
        .as_slice()
        .iter()
        .map(|&v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 })
        .collect();
    let inf = sign.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if inf == 0.0 {
        return Ok(DenseVector::zeros(m * n));
    }
    let sm = DenseMatrix::from_col_major(m, n, sign.clone())?;
    let spectral = svd_truncated(&sm, 1)?.singular_values.as_slice()[0];
    let scale = spectral.max(inf / mu2);
    DenseVector::from_vec(sign.into_iter().map(|v| v / scale).collect())
}

/// min ‖X‖_*  s.t.  X_ij = vals_k for (i, j) = omega_k
pub fn matrix_completion(
    omega: &[(usize, usize)],
    vals: &DenseVector,
    m: usize,
    n: usize,
) -> Result<ProblemSpec> {
    if omega.is_empty() {
        return Err(FalcError::InvalidArgument("no observed entries".into()));
    }
    if omega.len() != vals.len() {
        return Err(FalcError::Shape(format!(
            "{} indices but {} values",
            omega.len(),
            vals.len()
        )));
    }
    let map = LinearMap::sampling(m, n, omega.to_vec())?;
    Ok(ProblemSpec {
        m,
        n,
        alpha: NormIndex::One,
        beta: NormIndex::One,
        gamma: NormIndex::Two,
        mu1: 1.0,
        mu2: 0.0,
        rho: 0.0,
        blocks: vec![ConstraintBlock::new(map, vals.clone(), false, false)],
        label: "matrix_completion".into(),
    })
}

/// min ‖x‖₁  s.t.  a·x = b, with x stored as an n×1 matrix.
///
/// The ℓ1 term lives on a slack block x + s = 0, so s = −x.
pub fn basis_pursuit(a: &DenseMatrix, b: &DenseVector) -> Result<ProblemSpec> {
    let (q, n) = a.shape();
    if q != b.len() {
        return Err(FalcError::Shape(format!("a has {q} rows but b has length {}", b.len())));
    }
    if q == 0 || n == 0 {
        return Err(FalcError::Shape("empty measurement matrix".into()));
    }
    let objective = ConstraintBlock::new(LinearMap::vectorize(n, 1), DenseVector::zeros(n), true, false);
    let measurements = ConstraintBlock::new(LinearMap::dense(n, 1, a.clone())?, b.clone(), false, false);
    Ok(ProblemSpec {
        m: n,
        n: 1,
        alpha: NormIndex::One,
        beta: NormIndex::One,
        gamma: NormIndex::Two,
        mu1: 0.0,
        mu2: 1.0,
        rho: 0.0,
        blocks: vec![objective, measurements],
        label: "basis_pursuit".into(),
    })
}
